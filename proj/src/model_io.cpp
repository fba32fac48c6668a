#include "ssctm/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ssctm/errors.hpp"
#include "ssctm/textfmt.hpp"

namespace ssctm {

namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw Error(std::string("model JSON: missing or non-numeric field \"") +
                key + "\"");
  return obj[key].get<double>();
}

std::vector<double> number_array(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw Error(std::string("model JSON: \"") + what +
                "\" must be a non-empty array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number())
      throw Error(std::string("model JSON: \"") + what +
                  "\" must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> number_matrix(const json& arr,
                                               const char* what) {
  if (!arr.is_array() || arr.empty())
    throw Error(std::string("model JSON: \"") + what +
                "\" must be a non-empty array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(arr.size());
  for (const auto& row : arr) out.push_back(number_array(row, what));
  return out;
}

}  // namespace

FreewayModel parse_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("model JSON: parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw Error("model JSON: top level must be an object");
  for (const char* key : {"cells", "beta", "modes", "lambda"})
    if (!doc.contains(key))
      throw Error(std::string("model JSON: missing field \"") + key + "\"");

  FreewayModel model;
  const json& cells = doc["cells"];
  if (!cells.is_object())
    throw Error("model JSON: \"cells\" must be an object");
  model.cell.l = number_field(cells, "l");
  model.cell.v = number_field(cells, "v");
  model.cell.w = number_field(cells, "w");
  model.cell.n_max = number_field(cells, "n_max");
  model.beta = number_array(doc["beta"], "beta");
  model.modes = number_matrix(doc["modes"], "modes");
  model.lambda = number_matrix(doc["lambda"], "lambda");
  return model;
}

FreewayModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

namespace {

void append_row(std::string& out, const std::vector<double>& row) {
  out += '[';
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ", ";
    out += fmt_g17(row[i]);
  }
  out += ']';
}

void append_matrix(std::string& out, const std::vector<std::vector<double>>& m,
                   const std::string& indent) {
  out += "[\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += indent + "  ";
    append_row(out, m[i]);
    if (i + 1 < m.size()) out += ',';
    out += '\n';
  }
  out += indent + "]";
}

}  // namespace

std::string serialize_model(const FreewayModel& model) {
  std::string out = "{\n";
  out += "  \"cells\": {\"l\": " + fmt_g17(model.cell.l) +
         ", \"v\": " + fmt_g17(model.cell.v) +
         ", \"w\": " + fmt_g17(model.cell.w) +
         ", \"n_max\": " + fmt_g17(model.cell.n_max) + "},\n";
  out += "  \"beta\": ";
  append_row(out, model.beta);
  out += ",\n  \"modes\": ";
  append_matrix(out, model.modes, "  ");
  out += ",\n  \"lambda\": ";
  append_matrix(out, model.lambda, "  ");
  out += "\n}\n";
  return out;
}

}  // namespace ssctm
