#pragma once

// Output-feedback interconnection of two delay pH systems and delayed
// output feedback around a standard pH system.

#include "phdelay/delay_cert.hpp"
#include "phdelay/model.hpp"

namespace phdelay {

enum class FeedbackClass { kPowerConserving, kDissipative, kGeneral };

const char* to_string(FeedbackClass c);

/// Power conserving when ||Sym(F)||_2 <= 1e-12 (1 + ||F||_2), dissipative
/// when -Sym(F) is PSD, general otherwise. Throws DimensionError unless F is
/// square.
FeedbackClass classify_feedback(const Matrix& f, const Tolerance& tol = {});

/// Closes u = F y + v around the stacked pair. The block-diagonal aggregate
/// keeps the subsystem delay terms as they are (Z = diag(Z1, Z2)), and the
/// feedback term G F G^T is split so that its skew part lands in J and the
/// negated symmetric part in R. Theta = diag(Theta1, Theta2) when both are
/// set. Requires equal delays unless one side is empty (n = 0), in which case
/// F acts on the other side alone.
DelayPHSystem interconnect(const DelayPHSystem& sys1, const DelayPHSystem& sys2, const Matrix& f);

/// Checks [[R~ - G~ Sym(F) G~^T - Theta~, Z~/2], [Z~^T/2, Theta~]] >= 0 with
/// Theta~ >= 0. Both systems must carry Theta (PreconditionError otherwise).
Certificate certify_interconnection(const DelayPHSystem& sys1, const DelayPHSystem& sys2,
                                    const Matrix& f, const Tolerance& tol = {});

/// u(t) = -F y(t - tau) + v(t) around a standard pH system: Z = G F G^T, all
/// other blocks copied, Theta unset. Nothing is asserted about the result.
DelayPHSystem close_delayed_feedback(const StandardPHSystem& sys, const Matrix& f, double tau);

struct FeedbackConditions {
  /// ker(G^T) = {0}, i.e. G has full row rank.
  bool gt_injective = false;
  bool kernel_r_in_kernel_gt = false;
  /// ker(R) ∩ image(G) = {0}.
  bool kernel_r_meets_image_g_trivially = false;

  bool all() const { return gt_injective && kernel_r_in_kernel_gt && kernel_r_meets_image_g_trivially; }
};

FeedbackConditions check_feedback_conditions(const Matrix& r, const Matrix& g,
                                             const Tolerance& tol = {});

struct GainBound {
  /// 1 / ||V1^T G||_2^2; +inf when unbounded.
  double beta = 0.0;
  /// V1^T G = 0, so Z = G F G^T never couples through the range of R.
  bool unbounded = false;
};

/// Any F with ||F||_2 <= beta keeps ||V1^T G F G^T V1||_2 <= 1, so
/// construct_theta succeeds on the closed loop. Throws PreconditionError when
/// R is not PSD, ker(R) is not inside ker(G^T), or ker(R) meets image(G).
GainBound feedback_gain_bound(const Matrix& h, const Matrix& r, const Matrix& g,
                              const Tolerance& tol = {});

}  // namespace phdelay
