#include "decomp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace decomp::io {

namespace {

std::string lower_ext(const std::string& path) {
    const auto pos = path.find_last_of('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str())
        throw IoError("cannot parse number '" + tok + "' in " + context);
    return v;
}

// pgm tokenizer skipping whitespace and '#' comments (but we parse the range
// comment separately before tokenizing)
struct PgmScanner {
    const std::string& data;
    std::size_t pos = 0;
    std::string next_token() {
        while (pos < data.size()) {
            if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        std::size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])))
            ++pos;
        return data.substr(start, pos - start);
    }
};

}  // namespace

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

GridField read_field(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "csv" || ext == "txt") return read_csv(path);
    if (ext == "pgm") return read_pgm(path);
    throw IoError("unsupported input format: " + path);
}

void write_field(const std::string& path, const GridField& f) {
    const std::string ext = lower_ext(path);
    if (ext == "csv" || ext == "txt") {
        write_csv(path, f);
        return;
    }
    if (ext == "pgm") {
        write_pgm(path, f);
        return;
    }
    throw IoError("unsupported output format: " + path);
}

GridField read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        std::vector<double> row;
        for (const auto& tok : split(line, ','))
            row.push_back(parse_double(tok, path));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("no data in " + path);
    const std::size_t w = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != w) throw IoError("ragged rows in " + path);
    if (w == 1) {
        std::vector<double> v(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i][0];
        return GridField(static_cast<int>(rows.size()), std::move(v));
    }
    if (rows.size() == 1) return GridField(static_cast<int>(w), rows.front());
    std::vector<double> v;
    v.reserve(w * rows.size());
    for (const auto& r : rows) v.insert(v.end(), r.begin(), r.end());
    return GridField(static_cast<int>(w), static_cast<int>(rows.size()), std::move(v));
}

void write_csv(const std::string& path, const GridField& f) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (f.dims() == 1) {
        for (int i = 0; i < f.nx(); ++i) out << format_value(f[i]) << '\n';
    } else {
        for (int iy = 0; iy < f.ny(); ++iy) {
            for (int ix = 0; ix < f.nx(); ++ix) {
                if (ix) out << ',';
                out << format_value(f.at(ix, iy));
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

GridField read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();

    double rmin = 0.0, rmax = 0.0;
    bool have_range = false;
    if (const auto pos = data.find("# range "); pos != std::string::npos) {
        const auto eol = data.find('\n', pos);
        std::istringstream rs(data.substr(pos + 8, eol - pos - 8));
        if (rs >> rmin >> rmax) have_range = true;
    }

    PgmScanner sc{data};
    const std::string magic = sc.next_token();
    if (magic != "P2" && magic != "P5") throw IoError("not a PGM file: " + path);
    const int w = static_cast<int>(parse_double(sc.next_token(), path));
    const int h = static_cast<int>(parse_double(sc.next_token(), path));
    const long maxval = static_cast<long>(parse_double(sc.next_token(), path));
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw IoError("bad PGM header in " + path);
    if (!have_range) {
        rmin = 0.0;
        rmax = static_cast<double>(maxval);
    }

    std::vector<long> q(static_cast<std::size_t>(w) * h);
    if (magic == "P2") {
        for (auto& cell : q) cell = static_cast<long>(parse_double(sc.next_token(), path));
    } else {
        std::size_t pos = sc.pos;
        if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
            throw IoError("bad P5 payload in " + path);
        ++pos;  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        if (data.size() - pos < q.size() * bytes)
            throw IoError("truncated P5 payload in " + path);
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (bytes == 1) {
                q[i] = static_cast<unsigned char>(data[pos + i]);
            } else {
                q[i] = (static_cast<long>(static_cast<unsigned char>(data[pos + 2 * i])) << 8) |
                       static_cast<unsigned char>(data[pos + 2 * i + 1]);
            }
        }
    }
    std::vector<double> v(q.size());
    const double span = rmax - rmin;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < 0 || q[i] > maxval) throw IoError("pixel out of range in " + path);
        // the top quantization level maps back to the recorded max exactly
        v[i] = q[i] == maxval ? rmax : rmin + (q[i] * span) / maxval;
    }
    if (h == 1) return GridField(w, std::move(v));
    return GridField(w, h, std::move(v));
}

void write_pgm(const std::string& path, const GridField& f, int bits, bool binary) {
    if (f.masked()) throw IoError("write_pgm: masked fields are not supported");
    if (bits != 8 && bits != 16) throw IoError("write_pgm: bits must be 8 or 16");
    const long maxval = bits == 8 ? 255 : 65535;
    double rmin = f[0], rmax = f[0];
    for (std::size_t i = 0; i < f.size(); ++i) {
        rmin = std::min(rmin, f[i]);
        rmax = std::max(rmax, f[i]);
    }
    const double span = rmax - rmin;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    char head[160];
    std::snprintf(head, sizeof(head), "%s\n# range %.17g %.17g\n%d %d\n%ld\n",
                  binary ? "P5" : "P2", rmin, rmax, f.nx(),
                  f.dims() == 2 ? f.ny() : 1, maxval);
    out << head;
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
        long q = 0;
        if (span > 0.0) {
            q = std::lround((f[i] - rmin) / span * static_cast<double>(maxval));
            q = std::clamp(q, 0L, maxval);
        }
        if (binary) {
            if (bits == 16) {
                const unsigned char hi = static_cast<unsigned char>((q >> 8) & 0xFF);
                const unsigned char lo = static_cast<unsigned char>(q & 0xFF);
                out.put(static_cast<char>(hi));
                out.put(static_cast<char>(lo));
            } else {
                out.put(static_cast<char>(q & 0xFF));
            }
        } else {
            out << q << ((i + 1) % 16 == 0 ? '\n' : ' ');
        }
    }
    if (!binary) out << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    return digest_hex(fnv1a64(data.data(), data.size()));
}

std::vector<double> read_sequence(const std::string& file_or_inline) {
    if (std::filesystem::exists(file_or_inline)) {
        const GridField f = read_csv(file_or_inline);
        return f.values();
    }
    std::vector<double> out;
    for (const auto& tok : split(file_or_inline, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str())
            throw IoError("cannot parse sequence element '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw IoError("empty sequence input");
    return out;
}

}  // namespace decomp::io
