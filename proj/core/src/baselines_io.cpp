#include <string>

#include "helio/baselines.hpp"
#include "helio/error.hpp"
#include "helio/text.hpp"
#include "model_text.hpp"

namespace helio {

namespace {

std::string row_text(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double17(values[i]);
  }
  return out;
}

std::vector<double> read_row(detail::ModelReader& in, std::size_t expected) {
  auto values = detail::parse_numbers(in.next_line());
  if (values.size() != expected) raise(ErrorCode::MalformedModel, "row has wrong width");
  return values;
}

}  // namespace

std::string save_lin_model(const LinModel& model) {
  detail::ModelWriter out("HELIOMLR", 1);
  out.put("n_features", std::to_string(model.coefficients.size()));
  out.put("intercept", model.intercept);
  out.put("ridge_lambda", model.ridge_lambda);
  out.line(row_text(model.coefficients));
  return std::move(out).finish();
}

LinModel load_lin_model(std::string_view bytes) {
  detail::ModelReader in(bytes, "HELIOMLR", 1);
  LinModel model;
  const auto n = in.expect_int("n_features");
  if (n < 0) raise(ErrorCode::MalformedModel, "negative feature count");
  model.intercept = in.expect_double("intercept");
  model.ridge_lambda = in.expect_double("ridge_lambda");
  model.coefficients = read_row(in, static_cast<std::size_t>(n));
  return model;
}

std::string save_mlp_model(const MlpModel& model) {
  detail::ModelWriter out("HELIOMLP", 1);
  out.put("activation", "tanh");
  out.put("inputs", std::to_string(model.inputs));
  out.put("hidden_units", std::to_string(model.hidden_units));
  out.put("seed", std::to_string(model.seed));
  out.put("restarts", std::to_string(model.restarts.size()));
  for (const auto& w : model.restarts) {
    for (std::size_t h = 0; h < w.hidden; ++h) {
      out.line(row_text(std::span<const double>(w.w1).subspan(h * w.inputs, w.inputs)));
    }
    out.line(row_text(w.b1));
    out.line(row_text(w.w2));
    out.put("b2", w.b2);
  }
  return std::move(out).finish();
}

MlpModel load_mlp_model(std::string_view bytes) {
  detail::ModelReader in(bytes, "HELIOMLP", 1);
  if (in.expect("activation") != "tanh") raise(ErrorCode::MalformedModel, "unsupported activation");
  MlpModel model;
  const auto inputs = in.expect_int("inputs");
  const auto hidden = in.expect_int("hidden_units");
  model.seed = static_cast<std::uint64_t>(std::stoull(std::string(in.expect("seed"))));
  const auto restarts = in.expect_int("restarts");
  if (inputs < 1 || hidden < 1 || restarts < 0) raise(ErrorCode::MalformedModel, "bad network dimensions");
  model.inputs = static_cast<std::size_t>(inputs);
  model.hidden_units = static_cast<std::size_t>(hidden);
  for (long long r = 0; r < restarts; ++r) {
    MlpWeights w;
    w.inputs = model.inputs;
    w.hidden = model.hidden_units;
    for (std::size_t h = 0; h < w.hidden; ++h) {
      const auto row = read_row(in, w.inputs);
      w.w1.insert(w.w1.end(), row.begin(), row.end());
    }
    w.b1 = read_row(in, w.hidden);
    w.w2 = read_row(in, w.hidden);
    w.b2 = in.expect_double("b2");
    model.restarts.push_back(std::move(w));
  }
  return model;
}

}  // namespace helio
