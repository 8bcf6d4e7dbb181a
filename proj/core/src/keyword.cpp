#include "lugasr/keyword.hpp"

#include <cmath>

#include "lugasr/text_util.hpp"

namespace lugasr {

ConfusionCounts keyword_confusion(
    const std::vector<std::pair<std::string, bool>>& decodes,
    const std::string& keyword) {
  ConfusionCounts c;
  for (const auto& [transcript, expected] : decodes) {
    const bool detected = contains_whole_word(transcript, keyword);
    if (expected) {
      detected ? ++c.tp : ++c.fn;
    } else {
      detected ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

Prf prf(const ConfusionCounts& c) {
  Prf out;
  out.precision = (c.tp + c.fp) == 0
                      ? 1.0
                      : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  out.recall = (c.tp + c.fn) == 0
                   ? 1.0
                   : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double pr = out.precision + out.recall;
  out.fscore = pr == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / pr;
  return out;
}

namespace {
double truncate2(double v) { return std::floor(v * 100.0) / 100.0; }
}  // namespace

bool prf_matches_reference(const Prf& computed, const Prf& reference) {
  auto close = [](double a, double b) {
    return std::fabs(truncate2(a) - b) <= 0.005 + 1e-12;
  };
  return close(computed.precision, reference.precision) &&
         close(computed.recall, reference.recall) &&
         close(computed.fscore, reference.fscore);
}

KeywordEvalReport make_keyword_report(
    const std::map<std::string, ConfusionCounts>& per_keyword,
    std::optional<Prf> reference) {
  KeywordEvalReport report;
  report.per_keyword = per_keyword;
  for (const auto& [keyword, counts] : per_keyword)
    report.aggregate += counts;
  report.metrics = prf(report.aggregate);
  report.reference = reference;
  report.matches_reference =
      !reference || prf_matches_reference(report.metrics, *reference);
  return report;
}

}  // namespace lugasr
