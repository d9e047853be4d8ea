#include "json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bn6/errors.hpp"

namespace bn6::detail {

namespace {

void escape(std::string& out, const std::string& s) {
    out += '"';
    for (const char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) out += fmt::format("\\u{:04x}", c);
                else out += ch;
        }
    }
    out += '"';
}

void emit(std::string& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                escape(out, k);
                out += ": ";
                emit(out, v, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // short arrays of scalars stay on one line
            bool flat = j.size() <= 8;
            for (const auto& v : j) flat = flat && v.is_primitive();
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    emit(out, j[i], indent + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad_in;
                emit(out, j[i], indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float: out += fmt::format("{:.17g}", j.get<double>()); return;
        case Json::value_t::string: escape(out, j.get<std::string>()); return;
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    emit(out, j, 0);
    out += "\n";
    return out;
}

Json real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    const auto tmp = std::filesystem::path(p).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
        out << text;
        if (!out) throw Error(fmt::format("write to {} failed", tmp.string()));
    }
    std::filesystem::rename(tmp, p);
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot read {}", p.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& p) {
    try {
        return Json::parse(read_text_file(p));
    } catch (const Json::exception& e) {
        throw Error(fmt::format("{}: {}", p.string(), e.what()));
    }
}

}  // namespace bn6::detail
