#include "isslab/catalog.hpp"

#include "isslab/config.hpp"

namespace isslab {

ComparisonFn comparison_from_spec(const std::string& spec) {
  auto [name, params] = parse_catalog_spec(spec);
  return ComparisonFn::from_catalog(name, params);
}

ComparisonFn comparison_from_csv(const std::string& path) {
  auto [xs, ys] = read_two_column_csv(path);
  return ComparisonFn::from_samples(std::move(xs), std::move(ys));
}

TimeFun timefun_from_spec(const std::string& spec) {
  auto [name, params] = parse_catalog_spec(spec);
  return timefun_from_catalog(name, params);
}

TimeFun timefun_from_csv(const std::string& path) {
  auto [xs, ys] = read_two_column_csv(path);
  return timefun_from_samples(std::move(xs), std::move(ys));
}

InputSignal input_from_spec(const std::string& spec, int dim) {
  auto [name, params] = parse_catalog_spec(spec);
  auto param = [&params = params](std::size_t i, double dflt) {
    return i < params.size() ? params[i] : dflt;
  };
  Vec profile(std::size_t(dim), 1.0);
  if (name == "zero") return InputSignal::zero(dim);
  if (name == "constant") return InputSignal::constant(param(0, 1.0), profile);
  if (name == "step")
    return InputSignal::step(param(0, 1.0), param(1, 0.0), param(2, 1.0), profile);
  if (name == "sine")
    return InputSignal::sine(param(0, 1.0), param(1, 1.0), param(2, 0.0), profile);
  throw std::invalid_argument("input_from_spec: unknown input '" + name + "'");
}

InputSignal input_from_csv(const std::string& path) {
  auto rows = read_numeric_csv(path);
  require(rows.front().size() >= 2, "input_from_csv: need time plus components");
  const std::size_t m = rows.front().size() - 1;
  std::vector<double> times;
  std::vector<Vec> values;
  for (const auto& row : rows) {
    require(row.size() == m + 1, "input_from_csv: ragged rows");
    times.push_back(row[0]);
    values.push_back(Vec(row.begin() + 1, row.end()));
  }
  return InputSignal::sampled(std::move(times), std::move(values));
}

GeneratorSpec generator_from_blocks_csv(const std::string& path, int dim) {
  auto rows = read_numeric_csv(path);
  const std::size_t want = 1 + std::size_t(dim) * std::size_t(dim);
  std::vector<std::pair<double, Mat>> blocks;
  const std::size_t d = std::size_t(dim);
  for (const auto& row : rows) {
    require(row.size() == want,
            "generator_from_blocks_csv: each row needs t_start plus dim^2 entries");
    Mat a(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(i, j) = row[1 + i * d + j];
    blocks.push_back({row[0], std::move(a)});
  }
  return GeneratorSpec::matrix_piecewise(std::move(blocks));
}

}  // namespace isslab
