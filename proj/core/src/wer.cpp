#include "lugasr/wer.hpp"

#include <algorithm>
#include <sstream>

#include "lugasr/text_util.hpp"

namespace lugasr {

double AlignmentResult::wer() const {
  if (ref_len == 0) return errors() == 0 ? 0.0 : 1.0;
  return static_cast<double>(errors()) / static_cast<double>(ref_len);
}

std::vector<AlignedPair> word_align_ops(const std::string& ref,
                                        const std::string& hyp) {
  const auto r = split_words(ref);
  const auto h = split_words(hyp);
  const size_t nr = r.size(), nh = h.size();

  std::vector<std::vector<size_t>> d(nr + 1, std::vector<size_t>(nh + 1, 0));
  for (size_t i = 0; i <= nr; ++i) d[i][0] = i;
  for (size_t j = 0; j <= nh; ++j) d[0][j] = j;
  for (size_t i = 1; i <= nr; ++i) {
    for (size_t j = 1; j <= nh; ++j) {
      const size_t sub = d[i - 1][j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1);
      const size_t ins = d[i][j - 1] + 1;
      const size_t del = d[i - 1][j] + 1;
      d[i][j] = std::min({sub, ins, del});
    }
  }

  // backtrace, preferring substitution over insertion over deletion
  std::vector<AlignedPair> ops;
  size_t i = nr, j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (r[i - 1] == h[j - 1] ? 0 : 1)) {
      ops.push_back({r[i - 1] == h[j - 1] ? AlignOp::kMatch
                                          : AlignOp::kSubstitution,
                     r[i - 1], h[j - 1]});
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ops.push_back({AlignOp::kInsertion, "", h[j - 1]});
      --j;
    } else {
      ops.push_back({AlignOp::kDeletion, r[i - 1], ""});
      --i;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

AlignmentResult word_align(const std::string& ref, const std::string& hyp) {
  AlignmentResult result;
  result.ref_len = split_words(ref).size();
  for (const auto& op : word_align_ops(ref, hyp)) {
    switch (op.op) {
      case AlignOp::kMatch: break;
      case AlignOp::kSubstitution: ++result.substitutions; break;
      case AlignOp::kInsertion: ++result.insertions; break;
      case AlignOp::kDeletion: ++result.deletions; break;
    }
  }
  return result;
}

double corpus_wer(const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw EmptySet();
  size_t errors = 0, ref_len = 0;
  for (const auto& [ref, hyp] : pairs) {
    AlignmentResult a = word_align(ref, hyp);
    errors += a.errors();
    ref_len += a.ref_len;
  }
  if (ref_len == 0) return errors == 0 ? 0.0 : 1.0;
  return static_cast<double>(errors) / static_cast<double>(ref_len);
}

GroupWerReport group_wer(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw EmptySet();
  GroupWerReport report;
  auto add = [](GroupWerRow& row, const EvalPair& p, const AlignmentResult& a) {
    row.utterances += 1;
    row.ref_words += a.ref_len;
    row.errors += a.errors();
    row.duration_s += p.duration_s;
  };
  for (const auto& p : pairs) {
    AlignmentResult a = word_align(p.ref, p.hyp);
    add(report.overall, p, a);
    if (!p.group.empty()) add(report.groups[p.group], p, a);
  }
  auto finish = [](GroupWerRow& row) {
    row.wer = row.ref_words == 0
                  ? (row.errors == 0 ? 0.0 : 1.0)
                  : static_cast<double>(row.errors) / row.ref_words;
  };
  finish(report.overall);
  for (auto& [group, row] : report.groups) finish(row);
  return report;
}

std::string format_aligned_diff(const std::string& ref, const std::string& hyp) {
  auto ops = word_align_ops(ref, hyp);
  std::string ref_line, hyp_line, op_line;
  for (const auto& op : ops) {
    std::string r = op.ref_word.empty() ? "*" : op.ref_word;
    std::string h = op.hyp_word.empty() ? "*" : op.hyp_word;
    size_t width = std::max(r.size(), h.size());
    auto pad = [&](std::string s) {
      s.resize(width, ' ');
      return s;
    };
    char mark = ' ';
    switch (op.op) {
      case AlignOp::kMatch: mark = '.'; break;
      case AlignOp::kSubstitution: mark = 'S'; break;
      case AlignOp::kInsertion: mark = 'I'; break;
      case AlignOp::kDeletion: mark = 'D'; break;
    }
    if (!ref_line.empty()) {
      ref_line += ' ';
      hyp_line += ' ';
      op_line += ' ';
    }
    ref_line += pad(r);
    hyp_line += pad(h);
    op_line += pad(std::string(1, mark));
  }
  std::ostringstream os;
  os << "REF: " << ref_line << "\n";
  os << "HYP: " << hyp_line << "\n";
  os << "     " << op_line << "\n";
  return os.str();
}

}  // namespace lugasr
