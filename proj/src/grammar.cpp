#include "opplab/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace opplab::grammar {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("cannot parse " + what + " from '" + s + "'");
    return v;
}

std::int64_t parse_count(const std::string& s, const std::string& what) {
    double v = parse_real(s, what);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15)
        throw ConfigError(what + " must be a nonnegative integer: '" + s + "'");
    return static_cast<std::int64_t>(v);
}

CSeq parse_cseq(const std::string& text) {
    if (text.rfind("const=", 0) == 0)
        return CSeq::constant(parse_real(text.substr(6), "c constant"));
    if (text.rfind("k^-", 0) == 0)
        return CSeq::power_decay(parse_real(text.substr(3), "c decay exponent"));
    // bare constant, e.g. `ratioB:c=1`
    return CSeq::constant(parse_real(text, "c constant"));
}

}  // namespace

DistributionSpec parse_family(const std::string& raw) {
    std::string text = trim(raw);
    try {
        if (text == "uniform") return DistributionSpec::uniform();
        if (text.rfind("power:alpha=", 0) == 0)
            return DistributionSpec::power(parse_real(text.substr(12), "alpha"));
        if (text.rfind("ratioA:c=", 0) == 0)
            return DistributionSpec::ratio_a(parse_cseq(text.substr(9)));
        if (text.rfind("ratioB:c=", 0) == 0)
            return DistributionSpec::ratio_b(parse_cseq(text.substr(9)));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown distribution family: '" + text + "'");
}

ExpansionScheme parse_scheme(const std::string& raw) {
    std::string text = trim(raw);
    if (text == "luroth") return ExpansionScheme::luroth();

    bool identity_phi = false;
    double c_phi = 1.0;
    double d_y = 0.0;
    std::int64_t b1 = 1;
    DistributionSpec dist = DistributionSpec::uniform();

    for (const std::string& field : split(text, ',')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ConfigError("scheme field needs key=value: '" + field + "'");
        std::string key = trim(field.substr(0, eq));
        std::string val = trim(field.substr(eq + 1));
        if (key == "phi") {
            if (val == "identity") identity_phi = true;
            else if (val.rfind("const:", 0) == 0) c_phi = static_cast<double>(parse_count(val.substr(6), "phi constant"));
            else throw ConfigError("phi must be 'identity' or 'const:<int>': '" + val + "'");
        } else if (key == "y") {
            if (val.rfind("const:", 0) != 0) throw ConfigError("y must be 'const:<d>': '" + val + "'");
            d_y = parse_real(val.substr(6), "y constant");
        } else if (key == "dist") {
            dist = parse_family(val);
        } else if (key == "b1") {
            b1 = parse_count(val, "b1");
            if (b1 < 1) throw ConfigError("b1 must be >= 1");
        } else {
            throw ConfigError("unknown scheme field: '" + key + "'");
        }
    }
    try {
        ExpansionScheme s = identity_phi ? ExpansionScheme::identity_phi(d_y, std::move(dist))
                                         : ExpansionScheme::constant(c_phi, d_y, std::move(dist));
        s.b1 = b1;
        return s;
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

WeightScheme parse_weights(const std::string& raw, const DistributionSpec* dist) {
    WeightScheme w;
    w.label = trim(raw);
    bool have_a = false, have_b = false;

    CSeq c_seq;
    if (dist && dist->has_c_seq()) c_seq = dist->c_seq();

    for (const std::string& field : split(w.label, ',')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ConfigError("weight field needs key=value: '" + field + "'");
        std::string key = trim(field.substr(0, eq));
        std::string val = trim(field.substr(eq + 1));
        if (key == "a") {
            have_a = true;
            if (val == "1/k") {
                w.a = [](std::int64_t k) { return 1.0 / static_cast<double>(k); };
            } else if (val == "1/c_k") {
                if (!c_seq.fn) throw ConfigError("a=1/c_k needs a ratio-family distribution");
                w.a = [c_seq](std::int64_t k) { return 1.0 / c_seq(k); };
            } else if (val.rfind("const:", 0) == 0) {
                double v = parse_real(val.substr(6), "a constant");
                if (!(v > 0.0)) throw ConfigError("a constant must be positive");
                w.a = [v](std::int64_t) { return v; };
            } else if (val.rfind("log^", 0) == 0 && val.size() > 4 && val.find("(k)/k") != std::string::npos) {
                double p = parse_real(val.substr(4, val.find("(k)/k") - 4), "log exponent");
                w.a = [p](std::int64_t k) {
                    double lk = std::log(static_cast<double>(k));
                    return (p == 0.0 ? 1.0 : std::pow(lk, p)) / static_cast<double>(k);
                };
            } else {
                throw ConfigError("unknown a-weight: '" + val + "'");
            }
        } else if (key == "b") {
            have_b = true;
            if (val == "Cn_logCn") {
                if (!c_seq.fn) throw ConfigError("b=Cn_logCn needs a ratio-family distribution");
                w.b = [c_seq](std::int64_t n) {
                    KahanSum s;
                    for (std::int64_t k = 1; k <= n; ++k) s.add(1.0 / c_seq(k));
                    double c = s.value();
                    return c * std::log(c);
                };
            } else if (val.rfind("log^", 0) == 0 && val.find("(n)") != std::string::npos) {
                double p = parse_real(val.substr(4, val.find("(n)") - 4), "log exponent");
                w.b = [p](std::int64_t n) { return std::pow(std::log(static_cast<double>(n)), p); };
            } else if (val.rfind("n^", 0) == 0) {
                double g = parse_real(val.substr(2), "power exponent");
                w.b = [g](std::int64_t n) { return std::pow(static_cast<double>(n), g); };
            } else {
                throw ConfigError("unknown b-normalizer: '" + val + "'");
            }
        } else if (key == "alpha") {
            w.alpha = parse_real(val, "alpha");
            if (!(w.alpha > 0.0 && w.alpha <= 1.0)) throw ConfigError("weight alpha must lie in (0,1]");
        } else if (key == "limit") {
            w.limit = parse_real(val, "limit");
        } else {
            throw ConfigError("unknown weight field: '" + key + "'");
        }
    }
    if (!have_a || !have_b) throw ConfigError("weights need both a=... and b=...");
    return w;
}

TruncationPlan parse_plan(const std::string& raw) {
    TruncationPlan plan;
    for (const std::string& field : split(trim(raw), ',')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ConfigError("plan field needs key=value: '" + field + "'");
        std::string key = trim(field.substr(0, eq));
        std::string val = trim(field.substr(eq + 1));
        if (key == "trunc.b") plan.b = parse_real(val, "trunc.b");
        else if (key == "gamma") plan.gamma = parse_real(val, "gamma");
        else throw ConfigError("unknown plan field: '" + key + "'");
    }
    if (plan.b < 2.0) throw ConfigError("truncation exponent b must be >= 2");
    return plan;
}

std::vector<std::int64_t> parse_index_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const std::string& part : split(text, ','))
        if (!part.empty()) out.push_back(parse_count(part, "index"));
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& part : split(text, ','))
        if (!part.empty()) out.push_back(parse_real(part, "value"));
    return out;
}

}  // namespace opplab::grammar
