#include "cgame/io.hpp"

#include <charconv>
#include <cmath>

namespace cgame {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

}  // namespace cgame
