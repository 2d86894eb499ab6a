#include "ringlab/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>
#include <unistd.h>

namespace ringlab::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<std::string>& fields) {
    if (fields.size() != header_.size())
        throw ConfigError("CsvTable: row width does not match the header");
    rows_.push_back(fields);
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> f;
    f.reserve(values.size());
    for (double v : values) f.push_back(format_number(v));
    add_row(f);
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fields[i]);
        }
        out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

namespace {

Json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

}  // namespace

Json to_json(const QuadratureSpec& q) {
    return Json{{"order", q.order},
                {"split_threshold", q.split_threshold},
                {"singular_threshold", q.singular_threshold}};
}

Json to_json(const ModelParams& p) {
    return Json{{"alpha", p.alpha}, {"kappa", p.kappa},     {"chi", p.chi},
                {"gamma_const", p.gamma_const},             {"Omega", number(p.Omega)},
                {"mu", p.mu},       {"a1", p.a1},           {"a2", p.a2},
                {"b1", p.b1},       {"b2", p.b2},           {"coupling", to_string(p.coupling)},
                {"quadrature", to_json(p.quad)}};
}

Json to_json(const EquilibriumConfig& c) {
    return Json{{"type", to_string(c.type)},
                {"r1_hat", c.r1_hat},
                {"r2_hat", c.r2_hat},
                {"s1_hat", c.s1_hat},
                {"s2_hat", c.s2_hat},
                {"xi_hat", c.xi_hat},
                {"eta", c.eta},
                {"x_plus", c.x_plus},
                {"x_minus", c.x_minus},
                {"s_hat", c.s_hat},
                {"ring_center", c.ring_center},
                {"nu", number(c.nu)},
                {"A", number(c.A)},
                {"B", number(c.B)},
                {"x_gain", number(c.x_gain)},
                {"eps_star", number(c.eps_star)},
                {"a_hat", number(c.a_hat)},
                {"radii_method", c.radii_method},
                {"radii_residual", c.radii_residual}};
}

Json to_json(const OscillationSpec& s) {
    return Json{{"mu", s.mu}, {"mode", to_string(s.mode)}, {"phase", s.phase}};
}

Json to_json(const IntegratorSpec& s) {
    return Json{{"method", "rk4"}, {"step", s.step}, {"max_time", s.max_time}};
}

Json to_json(const FixedPoint& f) {
    return Json{{"label", f.label},
                {"kind", f.kind},
                {"s", f.s},
                {"x", f.x},
                {"lambda_unstable", f.lambda_unstable},
                {"lambda_stable", f.lambda_stable},
                {"tangent_slope", number(f.tangent_slope)}};
}

}  // namespace ringlab::io
