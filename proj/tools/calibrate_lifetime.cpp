// Recomputes the lifetime-model scale constants A0, A1 from the two
// endurance anchors (closed form) and prints the calibrated block, so the
// shipped config can be regenerated after changing the shape constants.

#include <cstdio>

#include "evdrive/config.hpp"

int main() {
    using namespace evdrive;
    const ToolkitConfig cfg = default_config();
    const auto [a, b] = lifetime_anchors();
    const LifetimeParams& lp = cfg.lifetime;

    std::printf("calibration anchors:\n");
    std::printf("  N_f(%g K, %g degC, %g s) = %g\n", a.delta_T, a.mean_Tj, a.t_on, a.N_f);
    std::printf("  N_f(%g K, %g degC, %g s) = %g\n", b.delta_T, b.mean_Tj, b.t_on, b.N_f);
    std::printf("calibrated constants:\n");
    std::printf("  A0 = %.17g\n  A1 = %.17g\n", lp.A0, lp.A1);
    std::printf("model check:\n");
    std::printf("  N_f(40) = %.6g (target %.6g)\n",
                cycles_to_failure(a.delta_T, a.mean_Tj, a.t_on, lp), a.N_f);
    std::printf("  N_f(80) = %.6g (target %.6g)\n",
                cycles_to_failure(b.delta_T, b.mean_Tj, b.t_on, lp), b.N_f);
    std::printf("  ratio   = %.6g (target %.6g)\n",
                cycles_to_failure(a.delta_T, a.mean_Tj, a.t_on, lp) /
                    cycles_to_failure(b.delta_T, b.mean_Tj, b.t_on, lp),
                a.N_f / b.N_f);
    return 0;
}
