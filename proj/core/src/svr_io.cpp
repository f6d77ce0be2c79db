#include <string>

#include "helio/error.hpp"
#include "helio/svr.hpp"
#include "helio/text.hpp"
#include "model_text.hpp"

namespace helio {

std::string save_model(const SvrModel& model) {
  detail::ModelWriter out("HELIOSVR", 1);
  out.put("kernel", to_string(model.kernel.kind));
  out.put("gamma", model.kernel.gamma);
  out.put("degree", std::to_string(model.kernel.degree));
  out.put("coef0", model.kernel.coef0);
  out.put("c", model.c);
  out.put("epsilon", model.epsilon);
  out.put("bias", model.bias);
  out.put("n_features", std::to_string(model.n_features));
  const auto& names = model.feature_names.empty() ? model.scaling.columns : model.feature_names;
  out.put("feature_names", join(names, ","));
  if (!model.scaling.empty()) {
    if (model.scaling.mean.size() != model.n_features) raise(ErrorCode::ShapeMismatch, "scaling width differs from model");
    for (std::size_t i = 0; i < model.n_features; ++i) {
      out.put("mean_" + std::to_string(i), model.scaling.mean[i]);
      out.put("std_" + std::to_string(i), model.scaling.stddev[i]);
    }
  }
  out.put("n_sv", std::to_string(model.dual_coefs.size()));
  for (std::size_t s = 0; s < model.dual_coefs.size(); ++s) {
    std::string line = format_double17(model.dual_coefs[s]);
    for (double v : model.support_vectors.row(s)) {
      line += ' ';
      line += format_double17(v);
    }
    out.line(line);
  }
  return std::move(out).finish();
}

SvrModel load_model(std::string_view bytes) {
  detail::ModelReader in(bytes, "HELIOSVR", 1);
  SvrModel model;
  model.kernel.kind = parse_kernel_kind(in.expect("kernel"));
  model.kernel.gamma = in.expect_double("gamma");
  model.kernel.degree = static_cast<int>(in.expect_int("degree"));
  model.kernel.coef0 = in.expect_double("coef0");
  model.c = in.expect_double("c");
  model.epsilon = in.expect_double("epsilon");
  model.bias = in.expect_double("bias");
  const auto d = in.expect_int("n_features");
  if (d < 0) raise(ErrorCode::MalformedModel, "negative feature count");
  model.n_features = static_cast<std::size_t>(d);
  model.feature_names = split_list(in.expect("feature_names"));
  if (!model.feature_names.empty() && model.feature_names.size() != model.n_features) {
    raise(ErrorCode::MalformedModel, "feature_names count differs from n_features");
  }
  if (in.peek().starts_with("mean_0=")) {
    model.scaling.columns = model.feature_names;
    for (std::size_t i = 0; i < model.n_features; ++i) {
      model.scaling.mean.push_back(in.expect_double("mean_" + std::to_string(i)));
      const double sd = in.expect_double("std_" + std::to_string(i));
      model.scaling.stddev.push_back(sd);
      model.scaling.constant.push_back(sd == 0.0);
    }
  }
  const auto n_sv = in.expect_int("n_sv");
  if (n_sv < 0) raise(ErrorCode::MalformedModel, "negative support-vector count");
  model.support_vectors = Matrix(0, model.n_features);
  for (long long s = 0; s < n_sv; ++s) {
    const auto values = detail::parse_numbers(in.next_line());
    if (values.size() != model.n_features + 1) raise(ErrorCode::MalformedModel, "support-vector row has wrong width");
    model.dual_coefs.push_back(values[0]);
    model.support_vectors.append_row(std::span<const double>(values).subspan(1));
  }
  if (!in.done()) raise(ErrorCode::MalformedModel, "trailing content after support vectors");
  model.kernel.validate();
  return model;
}

}  // namespace helio
