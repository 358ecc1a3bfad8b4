// Plain structured text configs: one `dotted.key = value` per line, lists in
// brackets. One canonical on-disk form (sorted keys) so manifests diff and
// hash stably. Unknown keys are rejected against a per-subcommand schema.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phonolab/dispersion.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load_file(const std::string& path);

    std::string serialize() const;  // canonical form
    std::uint64_t hash() const;     // FNV-1a over the canonical form

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long dflt) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
    std::vector<double> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double v);
    void set_int(const std::string& key, long long v);
    void set_list(const std::string& key, const std::vector<double>& v);

    // Throws ConfigError when a key is present that is not in `known`.
    void require_known(const std::vector<std::string>& known) const;

private:
    std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a64(const std::string& s);

// W(k) expressions: either "rj:<T>" for T/omega(k) or a sum of constants and
// cos terms like "1 + 0.5*cos(k1) - 0.25*cos(k3)".
RField parse_w_expression(const std::string& expr, const Grid3& g,
                          const DispersionModel& model);

// Site envelopes g(x): same grammar with cos(x1..x3), period the box side.
RField parse_envelope_expression(const std::string& expr, const Grid3& g);

// Dispersion from config keys: `<prefix>name` in {nn, nn-nnn-311, cosine,
// flat, stencil}, `<prefix>omega0`, and for "stencil" the integer triples in
// `<prefix>offsets` with `<prefix>values`.
DispersionModel parse_model(const KeyValueConfig& cfg, const std::string& prefix);

}  // namespace phonolab
