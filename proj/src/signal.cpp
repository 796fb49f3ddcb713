#include "sfrf/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "sfrf/error.hpp"
#include "sfrf/numeric_io.hpp"

namespace sfrf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool looks_like_header(const std::string& line) {
  return std::any_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

}  // namespace

Snapshot parse_snapshot_csv(std::istream& in, const std::string& origin,
                            double sampling_frequency_hz, int snapshot_index) {
  Snapshot snapshot;
  snapshot.sampling_frequency_hz = sampling_frequency_hz;
  snapshot.snapshot_index = snapshot_index;

  std::string line;
  std::size_t row = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (first_data_line && looks_like_header(line)) {
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      fail(ErrorKind::Parse, origin + ":" + std::to_string(row) +
                                 ": expected 2 columns, got " +
                                 std::to_string(fields.size()));
    }
    for (std::size_t col = 0; col < 2; ++col) {
      const auto value = parse_double(fields[col]);
      if (!value) {
        fail(ErrorKind::Parse, origin + ":" + std::to_string(row) + ":col " +
                                   std::to_string(col + 1) +
                                   ": not a number: '" +
                                   std::string(fields[col]) + "'");
      }
      (col == 0 ? snapshot.horizontal : snapshot.vertical).push_back(*value);
    }
  }
  if (snapshot.sample_count() < 2) {
    fail(ErrorKind::Parse,
         origin + ": snapshot window too short (" +
             std::to_string(snapshot.sample_count()) + " rows, need >= 2)");
  }
  return snapshot;
}

Snapshot load_snapshot(const std::filesystem::path& path,
                       double sampling_frequency_hz, int snapshot_index) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Data, "cannot open snapshot file: " + path.string());
  }
  return parse_snapshot_csv(in, path.string(), sampling_frequency_hz,
                            snapshot_index);
}

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot) {
  out << "Horizontal_vibration_signals,Vertical_vibration_signals\n";
  for (std::size_t i = 0; i < snapshot.sample_count(); ++i) {
    out << format_double(snapshot.horizontal[i]) << ','
        << format_double(snapshot.vertical[i]) << '\n';
  }
}

MagnitudeSpectrum magnitude_spectrum(std::span<const double> samples,
                                     double sampling_frequency_hz,
                                     WindowKind window) {
  const std::size_t n = samples.size();
  if (n < 2) {
    fail(ErrorKind::DegenerateSignal,
         "magnitude spectrum: need at least 2 samples");
  }

  std::vector<double> input(samples.begin(), samples.end());
  double coherent_gain = 1.0;
  if (window == WindowKind::Hann) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w =
          0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(t) /
                               static_cast<double>(n - 1));
      input[t] *= w;
      acc += w;
    }
    coherent_gain = acc / static_cast<double>(n);
  }

  const std::size_t bins = n / 2 + 1;
  std::vector<fftw_complex> out(bins);
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), input.data(),
                                  out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  MagnitudeSpectrum spectrum;
  spectrum.grid = snapshot_grid(sampling_frequency_hz, n);
  spectrum.magnitudes.resize(bins);
  const double scale = 1.0 / (static_cast<double>(n) * coherent_gain);
  for (std::size_t k = 0; k < bins; ++k) {
    const bool is_dc = k == 0;
    const bool is_nyquist = (n % 2 == 0) && (k == n / 2);
    const double one_sided = (is_dc || is_nyquist) ? 1.0 : 2.0;
    spectrum.magnitudes[k] =
        one_sided * scale * std::hypot(out[k][0], out[k][1]);
  }
  return spectrum;
}

void write_spectrum_csv(std::ostream& out, const MagnitudeSpectrum& spectrum) {
  out << "frequency_hz,magnitude\n";
  for (std::size_t i = 0; i < spectrum.magnitudes.size(); ++i) {
    out << format_double(spectrum.grid.frequency(i)) << ','
        << format_double(spectrum.magnitudes[i]) << '\n';
  }
}

RunToFailureRecord load_run(const std::filesystem::path& directory,
                            const OperatingMode& operating_mode,
                            const std::string& bearing_id) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    fail(ErrorKind::Data, "run directory not found: " + directory.string());
  }

  std::map<int, fs::path> files;  // keyed by numeric filename
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".csv") continue;
    const auto index = parse_int(p.stem().string());
    if (!index || *index < 1) continue;
    files.emplace(static_cast<int>(*index), p);
  }
  if (files.empty()) {
    fail(ErrorKind::EmptyRun,
         "no <k>.csv snapshots in " + directory.string());
  }

  RunToFailureRecord record;
  record.bearing_id =
      bearing_id.empty() ? directory.filename().string() : bearing_id;
  record.operating_mode = operating_mode;

  int expected = 1;
  for (const auto& [index, path] : files) {
    if (index != expected) {
      record.warnings.push_back("gap in snapshot numbering: expected " +
                                std::to_string(expected) + ", found " +
                                std::to_string(index));
    }
    expected = index + 1;
    record.snapshots.push_back(load_snapshot(
        path, operating_mode.sampling_frequency_hz, index));
  }
  return record;
}

}  // namespace sfrf
