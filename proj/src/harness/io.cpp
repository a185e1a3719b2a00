#include "riemannopt/harness/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "riemannopt/error.hpp"

namespace riemannopt::harness {

namespace fs = std::filesystem;

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw NumericalError("cannot format real");
  return std::string(buf.data(), ptr);
}

namespace {

double parse_real(const std::string& token, const std::string& what) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw IoError(fmt::format("{}: '{}' is not a finite number", what, token));
  }
  return value;
}

std::size_t parse_size(const std::string& token, const std::string& what) {
  std::size_t value = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw IoError(fmt::format("{}: '{}' is not a count", what, token));
  }
  return value;
}

// Value of `key=<value>` inside a header token.
std::string header_field(const std::string& token, const std::string& key,
                         const std::string& what) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw IoError(fmt::format("{}: expected '{}<value>' in header, got '{}'",
                              what, prefix, token));
  }
  return token.substr(prefix.size());
}

// Skips whitespace and `#` comments between PGM header tokens.
std::string next_pgm_token(std::istream& in, const fs::path& path) {
  std::string token;
  for (;;) {
    const int c = in.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  if (token.empty()) {
    throw IoError(fmt::format("{}: truncated PGM header", path.string()));
  }
  return token;
}

}  // namespace

InputVector read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  const std::string what = path.string();
  const std::string magic = next_pgm_token(in, path);
  if (magic != "P2" && magic != "P5") {
    throw IoError(fmt::format("{}: not a P2/P5 PGM file", what));
  }
  const std::size_t width = parse_size(next_pgm_token(in, path), what);
  const std::size_t height = parse_size(next_pgm_token(in, path), what);
  const std::size_t maxval = parse_size(next_pgm_token(in, path), what);
  if (width == 0 || height == 0) {
    throw IoError(fmt::format("{}: zero image size", what));
  }
  if (maxval == 0 || maxval > 65535) {
    throw IoError(fmt::format("{}: maxval {} outside 1..65535", what, maxval));
  }
  std::vector<double> values(width * height);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (double& v : values) {
      std::string token;
      if (!(in >> token)) throw IoError(fmt::format("{}: truncated pixel data", what));
      const std::size_t raw = parse_size(token, what);
      if (raw > maxval) throw IoError(fmt::format("{}: sample exceeds maxval", what));
      v = static_cast<double>(raw) * scale;
    }
  } else {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(values.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw IoError(fmt::format("{}: truncated pixel data", what));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::size_t sample =
          bytes == 1 ? raw[i] : (std::size_t{raw[2 * i]} << 8) | raw[2 * i + 1];
      if (sample > maxval) throw IoError(fmt::format("{}: sample exceeds maxval", what));
      values[i] = static_cast<double>(sample) * scale;
    }
  }
  return InputVector(std::move(values), ImageShape{height, width, 1});
}

void write_pgm(const fs::path& path, const InputVector& image, int maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw DomainError("write_pgm: maxval must be 255 or 65535");
  }
  const auto& shape = image.shape();
  if (!shape || shape->channels != 1) {
    throw InputShapeError("write_pgm: needs a single-channel image shape");
  }
  std::string data = fmt::format("P5\n{} {}\n{}\n", shape->width, shape->height, maxval);
  for (double v : image.values()) {
    const auto sample = static_cast<unsigned>(
        std::lround(std::clamp(v, 0.0, 1.0) * static_cast<double>(maxval)));
    if (maxval == 65535) data.push_back(static_cast<char>(sample >> 8));
    data.push_back(static_cast<char>(sample & 0xff));
  }
  write_text(path, data);
}

std::string format_schedule(const AlphaSchedule& schedule) {
  std::string text = fmt::format("k={} terminal=1.0\n", schedule.size());
  for (double a : schedule.points()) text += format_real(a) + "\n";
  return text;
}

AlphaSchedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string k_token, terminal_token;
  if (!(in >> k_token >> terminal_token)) throw IoError("schedule: missing header");
  const std::size_t k = parse_size(header_field(k_token, "k", "schedule"), "schedule");
  const double terminal =
      parse_real(header_field(terminal_token, "terminal", "schedule"), "schedule");
  if (terminal != 1.0) throw IoError("schedule: terminal must be 1.0");
  std::vector<double> points;
  std::string token;
  while (in >> token) points.push_back(parse_real(token, "schedule"));
  if (points.size() != k) {
    throw IoError(fmt::format("schedule: header says k={} but {} points follow", k,
                              points.size()));
  }
  try {
    return AlphaSchedule(std::move(points));
  } catch (const DomainError& e) {
    throw IoError(fmt::format("schedule: {}", e.what()));
  }
}

void write_schedule(const fs::path& path, const AlphaSchedule& schedule) {
  write_text(path, format_schedule(schedule));
}

AlphaSchedule read_schedule(const fs::path& path) {
  return parse_schedule(read_text(path));
}

std::string format_profile(const DerivativeProfile& profile) {
  std::string text = fmt::format("knots={}\n", profile.knots().size());
  for (std::size_t i = 0; i < profile.knots().size(); ++i) {
    text += format_real(profile.knots()[i]) + " " +
            format_real(profile.magnitudes()[i]) + "\n";
  }
  return text;
}

DerivativeProfile parse_profile(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!(in >> header)) throw IoError("profile: missing header");
  const std::size_t n = parse_size(header_field(header, "knots", "profile"), "profile");
  std::vector<double> knots, magnitudes;
  std::string a, b;
  while (in >> a) {
    if (!(in >> b)) throw IoError("profile: odd number of values");
    knots.push_back(parse_real(a, "profile"));
    magnitudes.push_back(parse_real(b, "profile"));
  }
  if (knots.size() != n) {
    throw IoError(fmt::format("profile: header says {} knots but {} follow", n,
                              knots.size()));
  }
  try {
    return DerivativeProfile(std::move(knots), std::move(magnitudes));
  } catch (const DomainError& e) {
    throw IoError(fmt::format("profile: {}", e.what()));
  }
}

void write_profile(const fs::path& path, const DerivativeProfile& profile) {
  write_text(path, format_profile(profile));
}

DerivativeProfile read_profile(const fs::path& path) {
  return parse_profile(read_text(path));
}

std::string format_weights(const MlpParameters& p) {
  p.validate();
  std::string text = fmt::format("layers {} {} {} 1 {}\n", p.input_dim, p.hidden1,
                                 p.hidden2, p.sigmoid_output ? "sigmoid" : "identity");
  auto put_rows = [&](const std::vector<double>& values, std::size_t cols) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      text += format_real(values[i]);
      text += (i + 1) % cols == 0 ? "\n" : " ";
    }
  };
  put_rows(p.w1, p.input_dim);
  put_rows(p.b1, p.b1.size());
  put_rows(p.w2, p.hidden1);
  put_rows(p.b2, p.b2.size());
  put_rows(p.w3, p.w3.size());
  text += format_real(p.b3) + "\n";
  return text;
}

MlpParameters parse_weights(const std::string& text) {
  std::istringstream lines(text);
  std::string body, line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line + "\n";
  }
  std::istringstream in(body);
  std::string tag, output;
  std::string d, h1, h2, out_units;
  if (!(in >> tag >> d >> h1 >> h2 >> out_units >> output) || tag != "layers") {
    throw IoError("weights: expected header 'layers <d> <h1> <h2> 1 <output>'");
  }
  MlpParameters p;
  p.input_dim = parse_size(d, "weights");
  p.hidden1 = parse_size(h1, "weights");
  p.hidden2 = parse_size(h2, "weights");
  if (parse_size(out_units, "weights") != 1) throw IoError("weights: output layer must have 1 unit");
  if (output == "sigmoid") {
    p.sigmoid_output = true;
  } else if (output == "identity") {
    p.sigmoid_output = false;
  } else {
    throw IoError("weights: output must be 'sigmoid' or 'identity'");
  }
  auto take = [&](std::size_t n) {
    std::vector<double> values(n);
    std::string token;
    for (double& v : values) {
      if (!(in >> token)) throw IoError("weights: fewer values than the layer sizes need");
      v = parse_real(token, "weights");
    }
    return values;
  };
  p.w1 = take(p.hidden1 * p.input_dim);
  p.b1 = take(p.hidden1);
  p.w2 = take(p.hidden2 * p.hidden1);
  p.b2 = take(p.hidden2);
  p.w3 = take(p.hidden2);
  p.b3 = take(1)[0];
  std::string extra;
  if (in >> extra) throw IoError("weights: more values than the layer sizes need");
  try {
    p.validate();
  } catch (const Error& e) {
    throw IoError(fmt::format("weights: {}", e.what()));
  }
  return p;
}

void write_weights(const fs::path& path, const MlpParameters& params) {
  write_text(path, format_weights(params));
}

MlpParameters read_weights(const fs::path& path) {
  return parse_weights(read_text(path));
}

std::string format_csv(const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::string text;
  auto put = [&](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) text += ',';
      const std::string& field = row[i];
      if (field.find_first_of(",\"\r\n") == std::string::npos) {
        text += field;
        continue;
      }
      text += '"';
      for (char c : field) {
        if (c == '"') text += '"';
        text += c;
      }
      text += '"';
    }
    text += "\r\n";
  };
  put(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw DomainError("csv row width differs from the header");
    }
    put(row);
  }
  return text;
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw IoError(fmt::format("cannot create directory '{}': {}",
                              path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  out.close();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace riemannopt::harness
