#include "phonolab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phonolab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.kv_.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        cfg.kv_[key] = val;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string KeyValueConfig::serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t KeyValueConfig::hash() const { return fnv1a64(serialize()); }

std::string KeyValueConfig::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (...) {
        throw ConfigError("config: key '" + key + "' is not a number");
    }
    if (trim(v.substr(pos)) != "")
        throw ConfigError("config: key '" + key + "' has trailing junk");
    return x;
}

double KeyValueConfig::get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

long long KeyValueConfig::get_int(const std::string& key) const {
    double v = get_double(key);
    long long i = static_cast<long long>(std::llround(v));
    if (static_cast<double>(i) != v)
        throw ConfigError("config: key '" + key + "' is not an integer");
    return i;
}

long long KeyValueConfig::get_int(const std::string& key, long long dflt) const {
    return has(key) ? get_int(key) : dflt;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    return static_cast<std::uint64_t>(std::stoull(get_string(key)));
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
    std::string v = get_string(key);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("config: key '" + key + "' is not a list");
    std::vector<double> out;
    std::string body = v.substr(1, v.size() - 2);
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        out.push_back(std::stod(t));
    }
    return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

void KeyValueConfig::set_double(const std::string& key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    kv_[key] = buf;
}

void KeyValueConfig::set_int(const std::string& key, long long v) { kv_[key] = std::to_string(v); }

void KeyValueConfig::set_list(const std::string& key, const std::vector<double>& v) {
    std::ostringstream os;
    os << "[";
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
        os << (i ? ", " : "") << buf;
    }
    os << "]";
    kv_[key] = os.str();
}

void KeyValueConfig::require_known(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : kv_) {
        bool ok = false;
        for (const std::string& cand : known)
            if (k == cand) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + k + "'");
    }
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct CosTerm {
    double coef = 0.0;
    int axis = -1;  // -1: constant
};

// sum of [sign] coeff [* cos(<v><axis>)] with v in {'k','x'}
std::vector<CosTerm> parse_terms(const std::string& expr, char var) {
    std::string s;
    for (char c : expr)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ConfigError("expression: empty");

    std::vector<CosTerm> terms;
    std::size_t i = 0;
    double sign = 1.0;
    if (s[0] == '+' || s[0] == '-') {
        sign = s[0] == '-' ? -1.0 : 1.0;
        i = 1;
    }
    while (i < s.size()) {
        // coefficient (optional when the term is a bare cos)
        double coef = 1.0;
        bool have_coef = false;
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.' ||
                                s[j] == 'e' || s[j] == 'E' ||
                                ((s[j] == '+' || s[j] == '-') && j > i &&
                                 (s[j - 1] == 'e' || s[j - 1] == 'E'))))
            ++j;
        if (j > i) {
            coef = std::stod(s.substr(i, j - i));
            have_coef = true;
            i = j;
        }
        CosTerm t;
        t.coef = sign * coef;
        if (i < s.size() && (s[i] == '*' || s[i] == 'c')) {
            if (s[i] == '*') ++i;
            if (s.compare(i, 4, "cos(") != 0)
                throw ConfigError("expression: expected cos( at '" + s.substr(i) + "'");
            i += 4;
            if (i >= s.size() || s[i] != var)
                throw ConfigError(std::string("expression: expected variable '") + var + "'");
            ++i;
            if (i >= s.size() || s[i] < '1' || s[i] > '3')
                throw ConfigError("expression: axis must be 1..3");
            t.axis = s[i] - '1';
            ++i;
            if (i >= s.size() || s[i] != ')') throw ConfigError("expression: expected ')'");
            ++i;
        } else if (!have_coef) {
            throw ConfigError("expression: dangling term in '" + s + "'");
        }
        terms.push_back(t);
        if (i == s.size()) break;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else {
            throw ConfigError("expression: expected + or - at '" + s.substr(i) + "'");
        }
    }
    return terms;
}

}  // namespace

RField parse_w_expression(const std::string& expr, const Grid3& g,
                          const DispersionModel& model) {
    std::string s = trim(expr);
    RField out(static_cast<std::size_t>(g.size()), 0.0);
    if (s.rfind("rj:", 0) == 0) {
        double T = std::stod(s.substr(3));
        for (std::int64_t i = 0; i < g.size(); ++i)
            out[static_cast<std::size_t>(i)] = T / model.omega(g, i);
        return out;
    }
    auto terms = parse_terms(s, 'k');
    for (std::int64_t i = 0; i < g.size(); ++i) {
        Vec3 k = g.kvec(i);
        double v = 0.0;
        for (const CosTerm& t : terms)
            v += t.axis < 0 ? t.coef : t.coef * std::cos(kTwoPi * k[static_cast<std::size_t>(t.axis)]);
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

RField parse_envelope_expression(const std::string& expr, const Grid3& g) {
    auto terms = parse_terms(trim(expr), 'x');
    RField out(static_cast<std::size_t>(g.size()), 0.0);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        IVec3 c = g.coords(i);
        double v = 0.0;
        for (const CosTerm& t : terms)
            v += t.axis < 0 ? t.coef
                            : t.coef * std::cos(kTwoPi * c[static_cast<std::size_t>(t.axis)] /
                                                static_cast<double>(g.side()));
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

DispersionModel parse_model(const KeyValueConfig& cfg, const std::string& prefix) {
    const std::string name = cfg.get_string(prefix + "name");
    const double omega0 = cfg.get_double(prefix + "omega0", 1.0);
    if (name == "stencil") {
        std::vector<double> offs = cfg.get_list(prefix + "offsets");
        std::vector<double> vals = cfg.get_list(prefix + "values");
        if (offs.size() != vals.size() * 3)
            throw ConfigError("model: offsets must hold 3 integers per value");
        std::vector<IVec3> offsets;
        for (std::size_t i = 0; i < vals.size(); ++i)
            offsets.push_back({static_cast<int>(std::llround(offs[3 * i])),
                               static_cast<int>(std::llround(offs[3 * i + 1])),
                               static_cast<int>(std::llround(offs[3 * i + 2]))});
        return DispersionModel::sqrt_stencil(CouplingStencil(offsets, vals), omega0, "stencil");
    }
    return DispersionModel::by_name(name, omega0);
}

}  // namespace phonolab
