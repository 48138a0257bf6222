use approx::assert_relative_eq;
use etc_core::bounds::{psi, tau_star, tau_star_max, LipschitzCoefficients, tau_hat};
use etc_core::plants::{lure_certificate, LureDesign};
use etc_core::trigger::{ClassK, DeltaSchedule};
use proptest::prelude::*;

proptest! {
    #[test]
    fn psi_increasing(t in 1e-5f64..5.0, dt in 1e-4f64..1.0, l2 in 0.1f64..5.0, p in 1.1f64..4.0) {
        let a = psi(t, l2, p).unwrap();
        let b = psi(t + dt, l2, p).unwrap();
        prop_assert!(a >= 0.0 && b > a);
    }

    #[test]
    fn tau_star_increasing_below_sup(chi in 0.0f64..1e3, dchi in 1e-3f64..10.0, kappa in 1.0f64..1e3, l2 in 0.2f64..3.0, m1 in 1e-3f64..1.0) {
        let a = tau_star(chi, kappa, l2, m1).unwrap();
        let b = tau_star(chi + dchi, kappa, l2, m1).unwrap();
        let sup = tau_star_max(kappa, l2, m1).unwrap();
        prop_assert!(a <= b);
        prop_assert!(b <= sup * (1.0 + 1e-12));
    }

    #[test]
    fn schedule_integral_additive(a in 0.0f64..60.0, w1 in 0.0f64..30.0, w2 in 0.0f64..30.0) {
        for s in [
            DeltaSchedule::Exponential { scale: 10.0, rate: 0.05 },
            DeltaSchedule::FactorialStaircase { scale: 2.0, base: 3.0, period: 10.0 },
            DeltaSchedule::Constant(10.0),
        ] {
            let whole = s.integral(a, a + w1 + w2);
            let split = s.integral(a, a + w1) + s.integral(a + w1, a + w1 + w2);
            assert_relative_eq!(whole, split, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn class_k_monotone(r in 0.0f64..100.0, dr in 1e-6f64..10.0, c in 0.1f64..5.0, e in 0.5f64..3.0) {
        for k in [ClassK::Linear(c), ClassK::Power { coeff: c, exponent: e }] {
            prop_assert!(k.eval(r + dr) > k.eval(r));
        }
    }

    /// Scaling `V_s` by υ scales the lower end of the λ interval by υ and the upper end by υ^{1/q}.
    #[test]
    fn lambda_range_scaling(u in 0.05f64..20.0) {
        let (consts, _) = lure_certificate(&LureDesign::benchmark()).unwrap();
        let base = consts.lambda_range().unwrap();
        let scaled = consts.scale_vs(u);
        let Ok(scaled) = scaled else { return Ok(()) };
        let r = scaled.lambda_range().unwrap();
        assert_relative_eq!(r.lower / base.lower, u, max_relative = 1e-12);
        assert_relative_eq!(r.upper / base.upper, u.powf(1.0 / consts.q()), max_relative = 1e-12);
    }

    /// Larger Lipschitz coefficients never lengthen the dwell-like time.
    #[test]
    fn tau_hat_shrinks_with_lipschitz(f in 0.2f64..8.0) {
        let (consts, _) = lure_certificate(&LureDesign::benchmark()).unwrap();
        let base = tau_hat(&consts, &LipschitzCoefficients::new(3.0, 1.0, 1.0).unwrap()).unwrap().to_f64();
        let lip = LipschitzCoefficients::new(3.0 * f, f, f).unwrap();
        let t = tau_hat(&consts, &lip).unwrap().to_f64();
        let ok = if f >= 1.0 { t <= base } else { t >= base };
        prop_assert!(ok, "f = {}, t = {}, base = {}", f, t, base);
    }
}
