#include "otrisk/measures.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace otrisk {

std::function<double(const std::vector<double>&, const std::vector<double>&)>
CostSpec::vector_cost() const {
    validate();
    if (metric != BaseMetric::Euclidean && metric != BaseMetric::WeightedEuclidean)
        throw Unsupported("CostSpec: vector cost requires a Euclidean-type metric");
    const double pw = p;
    const bool weighted = (metric == BaseMetric::WeightedEuclidean);
    const std::vector<double> mw = metric_weights;
    return [pw, weighted, mw](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size())
            throw InvalidInput("CostSpec: dimension mismatch");
        if (weighted && mw.size() != x.size())
            throw InvalidInput("CostSpec: metric weight dimension mismatch");
        double ss = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - y[k];
            ss += (weighted ? mw[k] : 1.0) * d * d;
        }
        return std::pow(std::sqrt(ss), pw);
    };
}

std::pair<double, double> estimate_moments(const std::vector<double>& claims) {
    if (claims.empty()) throw InvalidInput("estimate_moments: empty sample");
    std::vector<double> sq(claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
        const double x = claims[i];
        if (!(x > 0.0) || !std::isfinite(x))
            throw InvalidInput("estimate_moments: claims must be positive and finite");
        sq[i] = x * x;
    }
    const double n = static_cast<double>(claims.size());
    return {pairwise_sum(claims) / n, pairwise_sum(sq) / n};
}

namespace {

bool parse_double(const std::string& field, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(field, &pos);
    } catch (const std::exception&) {
        return false;
    }
    while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
    return pos == field.size();
}

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

std::vector<double> read_claims_csv(std::istream& in) {
    std::vector<double> claims;
    std::string line;
    std::size_t row = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back(); // tolerate CRLF
        const std::string field = strip(line);
        if (field.empty()) continue;
        double v = 0.0;
        if (!parse_double(field, v)) {
            if (first_data_row) { // a single non-numeric header row is allowed
                first_data_row = false;
                continue;
            }
            throw ParseError("read_claims_csv: non-numeric value '" + field + "'", row);
        }
        first_data_row = false;
        if (!(v > 0.0) || !std::isfinite(v))
            throw ParseError("read_claims_csv: claim must be positive and finite", row);
        claims.push_back(v);
    }
    if (claims.empty())
        throw InvalidInput("read_claims_csv: no claims in input");
    return claims;
}

std::vector<double> read_claims_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("read_claims_csv: cannot open '" + path + "'");
    return read_claims_csv(in);
}

} // namespace otrisk
