#include "uiground/io_util.hpp"

#include "uiground/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace uiground {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveScreenDims: return "NonPositiveScreenDims";
        case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
        case ErrorCode::GridCapacityExceeded: return "GridCapacityExceeded";
        case ErrorCode::NoUniquelyNamedElement: return "NoUniquelyNamedElement";
        case ErrorCode::NoUniqueAbsoluteReferent: return "NoUniqueAbsoluteReferent";
        case ErrorCode::NoUniqueRelativeReferent: return "NoUniqueRelativeReferent";
        case ErrorCode::DanglingScreenReference: return "DanglingScreenReference";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::EmptyCommand: return "EmptyCommand";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyScreen: return "EmptyScreen";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::InconsistentDimension: return "InconsistentDimension";
        case ErrorCode::SingleClassDataset: return "SingleClassDataset";
        case ErrorCode::WrongModelKind: return "WrongModelKind";
        case ErrorCode::EmptySplit: return "EmptySplit";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "UnknownError";
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_float(float v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(ErrorCode::SchemaMismatch, "bad numeric field '" + s + "'");
    return v;
}

float parse_float(const std::string& s) {
    float v = 0.0f;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(ErrorCode::SchemaMismatch, "bad numeric field '" + s + "'");
    return v;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot create directory " + path.parent_path().string());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoFailure, "cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) fail(ErrorCode::IoFailure, "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot rename " + tmp.string() + " to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace uiground
