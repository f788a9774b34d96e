#pragma once

namespace fasim {

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

/// Inverse standard normal CDF: Acklam's rational approximation (relative
/// error ~1e-9) followed by one Halley step against erfc, which brings the
/// error below 1e-14 on (1e-300, 1 - 1e-16). Throws on p outside (0, 1).
double normal_quantile(double p);

}  // namespace fasim
