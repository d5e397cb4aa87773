#ifndef HERALDSIM_CSV_WRITER_HPP
#define HERALDSIM_CSV_WRITER_HPP

#include <string>
#include <vector>

namespace heraldsim::cli {

// Scientific notation with 9 significant digits; fixed formatting keeps
// repeated runs byte-identical.
std::string format_sci(double v);

// CSV output with '#' metadata lines, written to <path>.tmp and renamed
// into place on close so readers never see a partial file.
class CsvWriter {
 public:
  explicit CsvWriter(std::string path);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void close();  // flush + atomic rename

 private:
  std::string path_;
  std::string tmp_path_;
  void* file_ = nullptr;  // FILE*
  bool closed_ = false;
};

}  // namespace heraldsim::cli

#endif
