#include "heraldsim/csv_writer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace heraldsim::cli {

std::string format_sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)), tmp_path_(path_ + ".tmp") {
  FILE* f = std::fopen(tmp_path_.c_str(), "wb");
  if (!f) throw std::runtime_error("CsvWriter: cannot open " + tmp_path_);
  file_ = f;
}

CsvWriter::~CsvWriter() {
  if (!closed_ && file_) {
    std::fclose(static_cast<FILE*>(file_));
    std::remove(tmp_path_.c_str());  // abandoned write, drop the partial file
  }
}

void CsvWriter::comment(const std::string& text) {
  std::fprintf(static_cast<FILE*>(file_), "# %s\n", text.c_str());
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  FILE* f = static_cast<FILE*>(file_);
  for (std::size_t i = 0; i < cells.size(); ++i)
    std::fprintf(f, "%s%s", i ? "," : "", cells[i].c_str());
  std::fputc('\n', f);
}

void CsvWriter::close() {
  if (closed_) return;
  FILE* f = static_cast<FILE*>(file_);
  if (std::fclose(f) != 0) throw std::runtime_error("CsvWriter: close failed for " + tmp_path_);
  file_ = nullptr;
  if (std::rename(tmp_path_.c_str(), path_.c_str()) != 0)
    throw std::runtime_error("CsvWriter: rename to " + path_ + " failed");
  closed_ = true;
}

}  // namespace heraldsim::cli
