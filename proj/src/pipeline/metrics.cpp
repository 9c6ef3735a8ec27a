#include "cbstream/pipeline/metrics.hpp"

#include <cstdio>

namespace cbstream::pipeline {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassScores scores(double tp, double fp, double fn) {
  ClassScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  return s;
}

nlohmann::json triple(double macro, double absent, double present) {
  return {{"macro", macro}, {"absent", absent}, {"present", present}};
}

}  // namespace

void ConfusionCounts::add(Label predicted, Label truth) {
  if (truth == Label::present) {
    (predicted == Label::present ? tp : fn) += 1;
  } else {
    (predicted == Label::present ? fp : tn) += 1;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

void ConfusionCounts::save(BinaryWriter& out) const {
  out.u64(tp);
  out.u64(fp);
  out.u64(tn);
  out.u64(fn);
}

ConfusionCounts ConfusionCounts::load(BinaryReader& in) {
  ConfusionCounts c;
  c.tp = in.u64();
  c.fp = in.u64();
  c.tn = in.u64();
  c.fn = in.u64();
  return c;
}

StreamMetrics compute_metrics(const ConfusionCounts& c) {
  StreamMetrics m;
  m.counts = c;
  m.samples_seen = c.total();
  const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  m.accuracy = ratio(tp + tn, tp + fp + tn + fn);
  m.present = scores(tp, fp, fn);
  // For the absent class the roles swap: tn are its hits, fn its false alarms.
  m.absent = scores(tn, fn, fp);
  m.macro.precision = (m.absent.precision + m.present.precision) / 2.0;
  m.macro.recall = (m.absent.recall + m.present.recall) / 2.0;
  m.macro.f1 = (m.absent.f1 + m.present.f1) / 2.0;
  return m;
}

nlohmann::json StreamMetrics::to_json() const {
  return {
      {"samples_seen", samples_seen},
      {"confusion", {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}}},
      {"accuracy", accuracy},
      {"precision", triple(macro.precision, absent.precision, present.precision)},
      {"recall", triple(macro.recall, absent.recall, present.recall)},
      {"f_measure", triple(macro.f1, absent.f1, present.f1)},
  };
}

std::string StreamMetrics::to_row(const std::string& title) const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s acc %6.2f | P %6.2f %6.2f %6.2f | R %6.2f %6.2f %6.2f | F %6.2f %6.2f %6.2f",
                title.c_str(), 100 * accuracy, 100 * macro.precision, 100 * absent.precision,
                100 * present.precision, 100 * macro.recall, 100 * absent.recall, 100 * present.recall,
                100 * macro.f1, 100 * absent.f1, 100 * present.f1);
  return buf;
}

}  // namespace cbstream::pipeline
