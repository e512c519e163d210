#include "paircorr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "paircorr/errors.hpp"

namespace paircorr {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

double Dataset::weight(std::size_t i) const {
    const auto& s = points.at(i).sigma_r;
    return s ? 1.0 / (*s * *s) : 1.0;
}

void Dataset::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.delta_p > 0.0) || !std::isfinite(p.delta_p)) {
            throw DomainError("dataset delta_p must be positive and finite");
        }
        if (i > 0 && !(p.delta_p > points[i - 1].delta_p)) {
            throw DomainError("dataset delta_p must be strictly increasing");
        }
        if (!std::isfinite(p.r)) {
            throw DomainError("dataset R must be finite");
        }
        if (p.sigma_r && (!(*p.sigma_r > 0.0) || !std::isfinite(*p.sigma_r))) {
            throw DomainError("dataset sigma_R must be positive and finite");
        }
    }
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return v;
}

std::string format_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

Dataset read_dataset(std::istream& in, std::string label) {
    Dataset data;
    data.label = std::move(label);
    std::vector<std::size_t> line_of;
    bool have_header = false;
    bool has_sigma = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line = trim(line.substr(3));
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() < 2 || fields.size() > 3 || fields[0] != "delta_p" || fields[1] != "R"
                || (fields.size() == 3 && fields[2] != "sigma_R")) {
                throw ParseError("expected header 'delta_p,R[,sigma_R]'", line_no);
            }
            has_sigma = fields.size() == 3;
            have_header = true;
            continue;
        }
        const std::size_t want = has_sigma ? 3 : 2;
        if (fields.size() != want) {
            throw ParseError("expected " + std::to_string(want) + " fields, got "
                                 + std::to_string(fields.size()),
                             line_no);
        }
        DataPoint p;
        const auto dp = parse_number(fields[0]);
        const auto r = parse_number(fields[1]);
        if (!dp || !std::isfinite(*dp)) {
            throw ParseError("malformed delta_p '" + std::string(fields[0]) + "'", line_no);
        }
        if (!r || !std::isfinite(*r)) {
            throw ParseError("malformed R '" + std::string(fields[1]) + "'", line_no);
        }
        if (!(*dp > 0.0)) {
            throw ParseError("delta_p must be positive", line_no);
        }
        p.delta_p = *dp;
        p.r = *r;
        if (has_sigma) {
            const auto s = parse_number(fields[2]);
            if (!s || !(*s > 0.0) || !std::isfinite(*s)) {
                throw ParseError("sigma_R must be a positive number", line_no);
            }
            p.sigma_r = *s;
        }
        data.points.push_back(p);
        line_of.push_back(line_no);
    }
    if (!have_header && line_no > 0) {
        throw ParseError("missing header 'delta_p,R[,sigma_R]'", line_no);
    }

    std::vector<std::size_t> order(data.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.points[a].delta_p < data.points[b].delta_p;
    });
    std::vector<DataPoint> sorted;
    sorted.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && data.points[order[k]].delta_p == data.points[order[k - 1]].delta_p) {
            throw ParseError("duplicate delta_p", std::max(line_of[order[k]], line_of[order[k - 1]]));
        }
        sorted.push_back(data.points[order[k]]);
    }
    data.points = std::move(sorted);
    return data;
}

Dataset read_dataset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open dataset '" + path.string() + "'");
    }
    return read_dataset(in, path.stem().string());
}

void write_dataset(std::ostream& out, const Dataset& data) {
    const bool with_sigma = !data.empty() && std::all_of(data.points.begin(), data.points.end(),
                                                         [](const DataPoint& p) { return p.sigma_r.has_value(); });
    if (!data.label.empty()) {
        out << "# " << data.label << '\n';
    }
    out << (with_sigma ? "delta_p,R,sigma_R\n" : "delta_p,R\n");
    for (const auto& p : data.points) {
        out << format_number(p.delta_p) << ',' << format_number(p.r);
        if (with_sigma) {
            out << ',' << format_number(*p.sigma_r);
        }
        out << '\n';
    }
}

std::vector<std::string> advisory_warnings(const Dataset& data) {
    std::vector<std::string> out;
    for (const auto& p : data.points) {
        if (p.r < -1.0) {
            out.push_back("R = " + format_number(p.r) + " < -1 at delta_p = " + format_number(p.delta_p));
        }
    }
    return out;
}

} // namespace paircorr
