#include "nsgp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nsgp/errors.hpp"
#include "nsgp/kernel.hpp"
#include "nsgp/linalg.hpp"
#include "rng.hpp"

namespace nsgp {
namespace {

double guarded(double range) { return range > 0.0 ? range : 1.0; }

Vector take(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

// Generator families. Each latent is a smooth log-periodic profile on [0, 1];
// the constants below fix the amount of nonstationarity per dataset.
using Profile = std::function<double(double)>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Profile constant(double v) {
  return [v](double) { return v; };
}
Profile log_sine(double base, double amplitude, double phase) {
  return [=](double t) { return base * std::exp(amplitude * std::sin(kTwoPi * t + phase)); };
}

struct Family {
  std::string_view name;
  Index size;
  Profile ell;
  Profile sigma;
  Profile omega;
};

const std::vector<Family>& families() {
  static const std::vector<Family> table = {
      {"D_sigma", 100, constant(0.1), log_sine(1.0, 0.9, 0.0), constant(0.1)},
      {"D_ell", 150, log_sine(0.06, 1.5, 0.0), constant(1.0), constant(0.05)},
      {"D_omega_sigma", 100, constant(0.1), log_sine(1.0, 0.9, 0.0),
       log_sine(0.2, 1.5, std::numbers::pi / 2)},
      {"D_omega_ell", 150, log_sine(0.06, 1.5, 0.0), constant(1.0),
       log_sine(0.2, 1.5, std::numbers::pi / 2)},
      {"D_omega_sigma_ell", 90, log_sine(0.2, 0.6, 0.0), log_sine(1.0, 0.6, std::numbers::pi),
       log_sine(0.02, 0.6, 2.0)},
  };
  return table;
}

// Step of height 2 at t = 0.4 on a slow sine, homoscedastic noise.
constexpr double kJumpAt = 0.4;
constexpr double kJumpHeight = 2.0;
constexpr double kJumpNoise = 0.05;
constexpr Index kJumpSize = 101;

Vector grid(Index n) {
  if (n < 2) throw std::invalid_argument("generate_dataset: need at least two points");
  return Vector::LinSpaced(n, 0.0, 1.0);
}

Vector tabulate(const Profile& p, const Vector& t) {
  return t.unaryExpr([&](double v) { return p(v); });
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view field, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError("not a finite number: '" + t + "'", line);
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

NormParams NormParams::fit(const Vector& x, const Vector& y) {
  NormParams p;
  if (x.size() > 0) {
    p.x_offset = x.minCoeff();
    p.x_scale = guarded(x.maxCoeff() - x.minCoeff());
  }
  if (y.size() > 0) {
    p.y_offset = 0.5 * (y.maxCoeff() + y.minCoeff());
    p.y_scale = guarded(0.5 * (y.maxCoeff() - y.minCoeff()));
  }
  return p;
}

Vector NormParams::normalize_x(const Vector& x) const { return (x.array() - x_offset) / x_scale; }
Vector NormParams::normalize_y(const Vector& y) const { return (y.array() - y_offset) / y_scale; }
Vector NormParams::denormalize_x(const Vector& x) const { return x.array() * x_scale + x_offset; }
Vector NormParams::denormalize_y(const Vector& y) const { return y.array() * y_scale + y_offset; }

const std::optional<Vector>& Truth::operator[](Component c) const {
  switch (c) {
    case Component::ell: return ell;
    case Component::sigma: return sigma;
    case Component::omega: return omega;
  }
  return ell;
}

Vector Dataset::train_x() const { return take(x_norm, train); }
Vector Dataset::train_y() const { return take(y_norm, train); }
Vector Dataset::test_x() const { return take(x_norm, test); }
Vector Dataset::test_y() const { return take(y_norm, test); }

std::optional<Vector> Dataset::log_truth(Component c, const std::vector<Index>& at) const {
  if (!truth || !(*truth)[c]) return std::nullopt;
  const double scale = c == Component::ell ? norm.x_scale : norm.y_scale;
  return Vector((take(*(*truth)[c], at).array() / scale).log());
}

Dataset make_dataset(std::string name, Vector x, Vector y, std::optional<Truth> truth) {
  if (x.size() != y.size()) throw DimensionError("make_dataset: x and y lengths differ");
  Dataset d;
  d.name = std::move(name);
  d.norm = NormParams::fit(x, y);
  d.x_norm = d.norm.normalize_x(x);
  d.y_norm = d.norm.normalize_y(y);
  d.x = std::move(x);
  d.y = std::move(y);
  d.train.resize(static_cast<std::size_t>(d.x.size()));
  for (Index i = 0; i < d.x.size(); ++i) d.train[static_cast<std::size_t>(i)] = i;
  d.truth = std::move(truth);
  return d;
}

std::vector<std::string> dataset_names() {
  std::vector<std::string> out;
  for (const Family& f : families()) out.emplace_back(f.name);
  out.emplace_back("J_like");
  return out;
}

Index default_size(std::string_view name) {
  if (name == "J_like") return kJumpSize;
  for (const Family& f : families()) {
    if (f.name == name) return f.size;
  }
  throw std::invalid_argument("unknown dataset '" + std::string(name) + "'");
}

Dataset generate_dataset(std::string_view name, Index n, std::uint64_t seed) {
  if (n <= 0) n = default_size(name);
  const Vector t = grid(n);
  auto rng = detail::make_rng(seed, 0, detail::kDatasetNoise);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noise = [&] { return Vector(Vector::NullaryExpr(n, [&](Index) { return normal(rng); })); };

  if (name == "J_like") {
    Vector f = t.unaryExpr([](double v) {
      return 0.5 * std::sin(kTwoPi * v) + (v >= kJumpAt ? kJumpHeight : 0.0);
    });
    const Vector y = f + kJumpNoise * noise();
    Truth truth;
    truth.omega = Vector::Constant(n, kJumpNoise);
    return make_dataset(std::string(name), t, y, truth);
  }

  const auto it = std::find_if(families().begin(), families().end(),
                               [&](const Family& f) { return f.name == name; });
  if (it == families().end()) {
    throw std::invalid_argument("unknown dataset '" + std::string(name) + "'");
  }
  Truth truth;
  truth.ell = tabulate(it->ell, t);
  truth.sigma = tabulate(it->sigma, t);
  truth.omega = tabulate(it->omega, t);

  const Matrix kf = kernel::nonstationary_kernel(t, *truth.ell, *truth.sigma).entries;
  const linalg::Cholesky chol = linalg::jittered_cholesky(kf, linalg::JitterPolicy::always);
  const Vector f = linalg::correlate(Vector::Zero(n), chol.lower(), noise());
  const Vector y = f + truth.omega->cwiseProduct(noise());
  return make_dataset(std::string(name), t, y, truth);
}

Dataset load_csv(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("CSV is empty");
  ++line_no;
  const std::vector<std::string> header = split_fields(line);
  const bool with_truth = header == std::vector<std::string>{"x", "y", "ell", "sigma", "omega"};
  if (!with_truth && header != std::vector<std::string>{"x", "y"}) {
    throw ParseError("expected header 'x,y' or 'x,y,ell,sigma,omega'", line_no);
  }
  const std::size_t width = header.size();

  std::vector<std::vector<double>> cols(width);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t k = 0; k < width; ++k) cols[k].push_back(parse_number(fields[k], line_no));
  }
  if (cols[0].empty()) throw ParseError("CSV has no data rows", line_no);

  auto to_vector = [](const std::vector<double>& v) {
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
  };
  std::optional<Truth> truth;
  if (with_truth) {
    truth.emplace();
    truth->ell = to_vector(cols[2]);
    truth->sigma = to_vector(cols[3]);
    truth->omega = to_vector(cols[4]);
  }
  return make_dataset(std::move(name), to_vector(cols[0]), to_vector(cols[1]), truth);
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_csv(in, path.stem().string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  const bool full_truth =
      data.truth && data.truth->ell && data.truth->sigma && data.truth->omega;
  out << (full_truth ? "x,y,ell,sigma,omega\n" : "x,y\n");
  const auto old_precision = out.precision(17);
  for (Index i = 0; i < data.size(); ++i) {
    out << data.x[i] << ',' << data.y[i];
    if (full_truth) {
      out << ',' << (*data.truth->ell)[i] << ',' << (*data.truth->sigma)[i] << ','
          << (*data.truth->omega)[i];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Dataset split(Dataset data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split: fraction must lie in (0, 1)");
  }
  const Index n = data.size();
  if (n < 2) throw DimensionError("split: need at least two points");
  const auto n_train =
      std::clamp<Index>(static_cast<Index>(std::ceil(fraction * static_cast<double>(n))), 1, n - 1);

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto rng = detail::make_rng(seed, 0, detail::kSplit);
  std::shuffle(order.begin(), order.end(), rng);

  data.train.assign(order.begin(), order.begin() + n_train);
  data.test.assign(order.begin() + n_train, order.end());
  std::sort(data.train.begin(), data.train.end());
  std::sort(data.test.begin(), data.test.end());
  return data;
}

}  // namespace nsgp
