#include "plstomo/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace plstomo {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Whitespace-separated token scanner with line tracking and '#' comments.
class Tokenizer {
public:
    Tokenizer(std::string text, std::string path)
        : text_(std::move(text)), path_(std::move(path)) {}

    // Returns false at end of input; on success fills token and its line.
    bool next(std::string& token, int& line) {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        if (pos_ >= text_.size()) return false;
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '#')
            ++pos_;
        token = text_.substr(start, pos_ - start);
        line = line_;
        return true;
    }

    int line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::string text_;
    std::string path_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

int parse_int_token(const Tokenizer& tok, const std::string& token, int line, const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(tok.path(), line, std::string("expected ") + what + ", got '" + token + "'");
    return value;
}

double parse_double_field(const std::string& path, int line, const std::string& field,
                          const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(path, line, std::string("non-numeric ") + what + " '" + field + "'");
    return value;
}

int parse_int_field(const std::string& path, int line, const std::string& field,
                    const char* what) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(path, line, std::string("non-numeric ") + what + " '" + field + "'");
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

void write_pgm(const Eigen::VectorXd& image, int width, int height, const std::string& path) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("write_pgm: dimensions must be positive");
    if (image.size() != static_cast<Eigen::Index>(width) * height)
        throw std::invalid_argument("write_pgm: image length does not match dimensions");
    for (Eigen::Index p = 0; p < image.size(); ++p)
        if (!(image[p] >= 0.0 && image[p] <= 1.0))
            throw std::invalid_argument("write_pgm: values must lie in [0,1]");

    std::string out;
    out.reserve(static_cast<std::size_t>(image.size()) * 4 + 32);
    out += "P2\n";
    out += std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (int j = height - 1; j >= 0; --j) { // top raster row = largest y
        for (int i = 0; i < width; ++i) {
            const long sample = std::lround(255.0 * image[static_cast<Eigen::Index>(j) * width + i]);
            if (i > 0) out += ' ';
            out += std::to_string(sample);
        }
        out += '\n';
    }
    write_file(path, out);
}

PgmImage read_pgm(const std::string& path) {
    Tokenizer tok(read_file(path), path);
    std::string token;
    int line = 1;

    if (!tok.next(token, line) || token != "P2")
        throw ParseError(path, line, "expected magic 'P2'");
    if (!tok.next(token, line)) throw ParseError(path, tok.line(), "missing width");
    const int width = parse_int_token(tok, token, line, "width");
    if (!tok.next(token, line)) throw ParseError(path, tok.line(), "missing height");
    const int height = parse_int_token(tok, token, line, "height");
    if (width < 1 || height < 1) throw ParseError(path, line, "dimensions must be positive");
    if (!tok.next(token, line)) throw ParseError(path, tok.line(), "missing maxval");
    const int maxval = parse_int_token(tok, token, line, "maxval");
    if (maxval != 255) throw ParseError(path, line, "maxval must be 255, got " + token);

    PgmImage img;
    img.width = width;
    img.height = height;
    img.values.resize(static_cast<Eigen::Index>(width) * height);
    const long total = static_cast<long>(width) * height;
    for (long k = 0; k < total; ++k) {
        if (!tok.next(token, line))
            throw ParseError(path, tok.line(),
                             "missing sample " + std::to_string(k + 1) + " of " +
                                 std::to_string(total));
        const int sample = parse_int_token(tok, token, line, "sample");
        if (sample < 0 || sample > 255)
            throw ParseError(path, line, "sample out of range: " + token);
        const int row = static_cast<int>(k / width); // raster row, top first
        const int i = static_cast<int>(k % width);
        const int j = height - 1 - row;
        img.values[static_cast<Eigen::Index>(j) * width + i] = sample / 255.0;
    }
    if (tok.next(token, line))
        throw ParseError(path, line, "trailing data after " + std::to_string(total) + " samples");
    return img;
}

void write_sinogram_csv(const Sinogram& sino, const std::string& path) {
    if (!sino.values.allFinite())
        throw std::invalid_argument("write_sinogram_csv: values must be finite");
    if (sino.values.size() != static_cast<Eigen::Index>(sino.n_angles) * sino.n_det)
        throw std::invalid_argument("write_sinogram_csv: length does not match shape");

    std::string out = "angle_index,det_index,value\n";
    for (int a = 0; a < sino.n_angles; ++a)
        for (int d = 0; d < sino.n_det; ++d)
            out += std::to_string(a) + "," + std::to_string(d) + "," +
                   fmt_double(sino.at(a, d)) + "\n";
    write_file(path, out);
}

Sinogram read_sinogram_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line_text;
    int line_no = 0;

    if (!std::getline(in, line_text))
        throw ParseError(path, 1, "missing header");
    ++line_no;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text != "angle_index,det_index,value")
        throw ParseError(path, 1, "missing header 'angle_index,det_index,value'");

    std::map<std::pair<int, int>, double> entries;
    int max_a = -1, max_d = -1;
    while (std::getline(in, line_text)) {
        ++line_no;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        if (line_text.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line_text);
        if (fields.size() != 3)
            throw ParseError(path, line_no, "expected 3 fields, got " +
                                                std::to_string(fields.size()));
        const int a = parse_int_field(path, line_no, fields[0], "angle_index");
        const int d = parse_int_field(path, line_no, fields[1], "det_index");
        const double v = parse_double_field(path, line_no, fields[2], "value");
        if (a < 0 || d < 0)
            throw ParseError(path, line_no, "negative index");
        if (!entries.emplace(std::make_pair(a, d), v).second)
            throw ParseError(path, line_no, "duplicate (angle,det) pair (" + fields[0] + "," +
                                                fields[1] + ")");
        max_a = std::max(max_a, a);
        max_d = std::max(max_d, d);
    }

    Sinogram sino;
    sino.n_angles = max_a + 1;
    sino.n_det = max_d + 1;
    const long expected = static_cast<long>(sino.n_angles) * sino.n_det;
    if (static_cast<long>(entries.size()) != expected)
        throw ParseError(path, line_no, "incomplete sinogram: " + std::to_string(entries.size()) +
                                            " entries for a " + std::to_string(sino.n_angles) +
                                            "x" + std::to_string(sino.n_det) + " shape");
    sino.values.resize(expected);
    for (const auto& [key, value] : entries)
        sino.values[static_cast<Eigen::Index>(key.first) * sino.n_det + key.second] = value;
    return sino;
}

void write_mask_csv(const Eigen::VectorXd& mask, int width, int height, const std::string& path) {
    if (mask.size() != static_cast<Eigen::Index>(width) * height)
        throw std::invalid_argument("write_mask_csv: mask length does not match dimensions");
    std::string out = "i,j,value\n";
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < width; ++i)
            out += std::to_string(i) + "," + std::to_string(j) + "," +
                   (mask[static_cast<Eigen::Index>(j) * width + i] > 0.5 ? "1\n" : "0\n");
    write_file(path, out);
}

void write_trace_csv(const std::vector<IterationRecord>& trace, const std::string& path) {
    std::string out = "iter,objective,grad_norm,lambda,tau,backtracks\n";
    for (const IterationRecord& rec : trace) {
        out += std::to_string(rec.iter) + "," + fmt_double(rec.objective) + "," +
               fmt_double(rec.grad_norm) + "," + fmt_double(rec.lambda) + "," +
               fmt_double(rec.tau) + "," + std::to_string(rec.backtracks) + "\n";
    }
    write_file(path, out);
}

std::string format_metrics_row(const MetricsRow& row) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.3f", row.seconds);
    return row.experiment + "," + row.method + "," + std::to_string(row.views) + "," +
           fmt_double(row.angle_range) + "," + fmt_double(row.jaccard) + "," +
           fmt_double(row.pixel_error) + "," + fmt_double(row.sinogram_rmse) + "," +
           std::to_string(row.iters) + "," + seconds;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::string out = "experiment,method,views,angle_range,jaccard,pixel_error,sinogram_rmse,iters,seconds\n";
    for (const MetricsRow& row : rows) out += format_metrics_row(row) + "\n";
    write_file(path, out);
}

} // namespace plstomo
