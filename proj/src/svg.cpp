#include <algorithm>
#include <cmath>
#include <sstream>

#include "accsim/io.hpp"

namespace accsim::io {
namespace {

constexpr double kWidth = 900, kPanel = 300, kMargin = 50;

struct Axis {
  double lo, hi;
  double map(double x, double px0, double px1) const { return px0 + (x - lo) / (hi - lo) * (px1 - px0); }
};

Axis axis_of(const Eigen::MatrixXd& m) {
  double lo = m.minCoeff(), hi = m.maxCoeff();
  if (!(hi > lo)) hi = lo + 1.0;
  return {lo, hi};
}

std::string color(Eigen::Index i, Eigen::Index n) {
  // blue (leader) -> red (tail)
  const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
  std::ostringstream os;
  os << "rgb(" << static_cast<int>(40 + 200 * f) << ",60," << static_cast<int>(220 - 180 * f) << ")";
  return os.str();
}

void panel(std::ostringstream& os, const TrajectoryLog& log, const Eigen::MatrixXd& y, double top, const char* label) {
  const Axis tx{log.t[0], log.t[log.ticks() - 1] > log.t[0] ? log.t[log.ticks() - 1] : log.t[0] + 1.0};
  const Axis ty = axis_of(y);
  const double x0 = kMargin, x1 = kWidth - kMargin / 2, y0 = top + kPanel - kMargin / 2, y1 = top + kMargin / 2;
  os << "<rect x='" << x0 << "' y='" << y1 << "' width='" << x1 - x0 << "' height='" << y0 - y1
     << "' fill='none' stroke='#888'/>\n";
  os << "<text x='" << x0 << "' y='" << y1 - 6 << "' font-size='12'>" << label << " [" << fixed6(ty.lo) << ", "
     << fixed6(ty.hi) << "] over t in [" << fixed6(tx.lo) << ", " << fixed6(tx.hi) << "] s</text>\n";
  const Eigen::Index stride = std::max<Eigen::Index>(1, log.ticks() / 1500);
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    os << "<polyline fill='none' stroke-width='1' stroke='" << color(i, y.cols()) << "' points='";
    for (Eigen::Index k = 0; k < log.ticks(); k += stride)
      os << fixed6(tx.map(log.t[k], x0, x1)) << ',' << fixed6(ty.map(y(k, i), y0, y1)) << ' ';
    os << "'/>\n";
  }
}

}  // namespace

std::string render_svg(const TrajectoryLog& log) {
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << 2 * kPanel << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  if (log.ticks() > 0) {
    panel(os, log, log.x, 0.0, "position x (m)");
    panel(os, log, log.v, kPanel, "speed v (m/s)");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace accsim::io
