use conic::conic::coeff_a;
use conic::ode_oracle::{radial_rhs, OdeState};
use conic::output::fmt_g;
use conic::zeeman::{zeeman_splitting, ZeemanParams};
use conic::{AzimuthalNumber, ConicConfig, ConicFunction};
use proptest::prelude::*;
use std::sync::OnceLock;

fn solutions() -> &'static Vec<(ConicFunction, ConicFunction)> {
    static CELL: OnceLock<Vec<(ConicFunction, ConicFunction)>> = OnceLock::new();
    CELL.get_or_init(|| {
        [1, 3, 5, 7]
            .iter()
            .map(|&n| {
                let cfg = ConicConfig::standard();
                let pos = ConicFunction::new(AzimuthalNumber::new(n).unwrap(), &cfg).unwrap();
                let neg = ConicFunction::new(AzimuthalNumber::new(-n).unwrap(), &cfg).unwrap();
                (pos, neg)
            })
            .collect()
    })
}

fn odd() -> impl Strategy<Value = i32> {
    (-40i32..40).prop_map(|k| 2 * k + 1)
}

proptest! {
    #[test]
    fn parse_display_round_trip(n in odd()) {
        let m = AzimuthalNumber::new(n).unwrap();
        prop_assert_eq!(m.to_string().parse::<AzimuthalNumber>().unwrap(), m);
        prop_assert_eq!((-m).value(), -m.value());
    }

    #[test]
    fn even_numerators_never_construct(k in -40i32..40) {
        prop_assert!(AzimuthalNumber::new(2 * k).is_err());
        let even = format!("{}/2", 2 * k);
        prop_assert!(even.parse::<AzimuthalNumber>().is_err());
    }

    #[test]
    fn reversing_m_swaps_components(i in 0usize..4, rho in 0.0f64..14.0) {
        let (pos, neg) = &solutions()[i];
        let a = pos.eval(rho).unwrap();
        let b = neg.eval(rho).unwrap();
        prop_assert_eq!(a.phi1, b.phi2);
        prop_assert_eq!(a.phi2, b.phi1);
    }

    #[test]
    fn solution_stays_finite_and_bounded(i in 0usize..4, rho in 0.0f64..40.0) {
        let s = solutions()[i].0.eval(rho).unwrap();
        prop_assert!(s.is_finite());
        prop_assert!(s.max_abs() <= 2.0);
    }

    #[test]
    fn radial_rhs_is_linear(
        n in odd(),
        rho in 0.01f64..10.0,
        s in proptest::array::uniform4(-5.0f64..5.0),
        c in -3.0f64..3.0,
    ) {
        let m = AzimuthalNumber::new(n).unwrap();
        let st = OdeState::new(s[0], s[1], s[2], s[3]);
        let a = radial_rhs(m, rho, c * st).unwrap();
        let b = c * radial_rhs(m, rho, st).unwrap();
        for (x, y) in [(a.phi1, b.phi1), (a.dphi1, b.dphi1), (a.phi2, b.phi2), (a.dphi2, b.dphi2)] {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn coefficients_have_fixed_signs(n in (0i32..12).prop_map(|k| 2 * k + 1)) {
        let m = AzimuthalNumber::new(n).unwrap();
        prop_assert!(coeff_a(m, 1).unwrap() > 0.0);
        prop_assert!(coeff_a(m, 2).unwrap() < 0.0);
    }

    #[test]
    fn splitting_is_linear_in_g_and_field(
        mm in 1e2f64..1e12,
        b in 0.0f64..10.0,
        te in 0.1f64..100.0,
        g in -1.0f64..1.0,
    ) {
        let m = AzimuthalNumber::new(1).unwrap();
        let p = ZeemanParams::new(mm, b, te).unwrap();
        let q = ZeemanParams::new(mm, 2.0 * b, te).unwrap();
        let base = zeeman_splitting(m, &p, g);
        prop_assert!((zeeman_splitting(m, &q, g) - 2.0 * base).abs() <= 1e-15 * (1.0 + base.abs()));
        prop_assert!((zeeman_splitting(m, &p, -g) + base).abs() <= 1e-15 * (1.0 + base.abs()));
    }

    #[test]
    fn printed_numbers_keep_ten_digits(x in prop_oneof![-1e12f64..1e12, -1e-6f64..1e-6]) {
        let back: f64 = fmt_g(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-10 * x.abs());
    }
}
