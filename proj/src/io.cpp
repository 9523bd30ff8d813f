#include "survlink/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "survlink/errors.hpp"

namespace survlink {

void write_sample_set(const std::string& path, const SampleSet& samples, const SampleSetMeta& meta) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  char header[160];
  std::snprintf(header, sizeof(header),
                "# survlink durations v1, sample_rate_hz=%.12g, threshold_db=%.12g, seed=%llu\n",
                meta.sample_rate_hz, meta.threshold_db,
                static_cast<unsigned long long>(meta.seed));
  out << header;
  char line[48];
  for (double d : samples.durations()) {
    std::snprintf(line, sizeof(line), "%.17g\n", d);
    out << line;
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

LoadedSampleSet read_sample_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header) || header.rfind("# survlink durations v1", 0) != 0) {
    throw DataError("'" + path + "': not a survlink durations v1 file");
  }
  LoadedSampleSet out;
  double rate = 0.0, thr = 0.0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(),
                  "# survlink durations v1, sample_rate_hz=%lf, threshold_db=%lf, seed=%llu",
                  &rate, &thr, &seed) == 3) {
    out.meta.sample_rate_hz = rate;
    out.meta.threshold_db = thr;
    out.meta.seed = seed;
  } else {
    throw DataError("'" + path + "': malformed durations header");
  }
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    char* end = nullptr;
    const double d = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) {
      throw DataError("'" + path + "': bad duration at line " + std::to_string(lineno));
    }
    if (!(d > 0.0)) {
      throw DataError("'" + path + "': nonpositive duration at line " + std::to_string(lineno));
    }
    out.samples.add(d);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace survlink
