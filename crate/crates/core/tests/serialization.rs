//! Property tests for the external text formats: round trips must be
//! bit-exact, including awkward spacings, and the gauge axioms must hold on
//! sampled inputs.

use proptest::prelude::*;
use quantiso::field::ScalarField;
use quantiso::gauge::GaugeBody;
use quantiso::grid::GridSet;
use quantiso::kernel::Kernel;

fn arb_gridset() -> impl Strategy<Value = GridSet<f64>> {
    (
        1usize..=3,
        1e-3f64..10.0,
        prop::collection::vec(any::<bool>(), 1..200),
        -20i64..20,
        -20i64..20,
    )
        .prop_map(|(dim, h, bits, ox, oy)| {
            let nx = 1 + bits.len() % 13;
            let ny = if dim >= 2 { 1 + bits.len() % 7 } else { 1 };
            let nz = if dim >= 3 { 2 } else { 1 };
            let origin = [ox, if dim >= 2 { oy } else { 0 }, 0];
            let mut s = GridSet::new(dim, h, [nx, ny, nz], origin).unwrap();
            for (i, b) in bits.iter().enumerate() {
                if *b {
                    let ix = i % nx;
                    let iy = (i / nx) % ny;
                    let iz = (i / (nx * ny)) % nz;
                    s.set_index([ix, iy, iz], true);
                }
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gridset_text_round_trip(e in arb_gridset()) {
        let text = e.to_text();
        let back = GridSet::<f64>::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.spacing().to_bits(), e.spacing().to_bits());
        prop_assert_eq!(back.symm_diff_measure(&e).unwrap(), 0.0);
    }

    #[test]
    fn field_text_round_trip(
        vals in prop::collection::vec(-1e6f64..1e6, 1..60),
        h in 1e-3f64..4.0,
    ) {
        let n = vals.len();
        let mut f = ScalarField::<f64>::zeros(1, h, [n, 1, 1], [-3, 0, 0]).unwrap();
        for (i, v) in vals.iter().enumerate() {
            f.set_index([i, 0, 0], *v);
        }
        let text = f.to_text();
        let back = ScalarField::<f64>::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn kernel_text_round_trip(k_extra in 0.0f64..3.0, dim in 1usize..=3) {
        let kern = Kernel::<f64>::cone(dim, k_extra).unwrap();
        let text = kern.to_text();
        let back = Kernel::<f64>::from_text(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn gauge_axioms_on_samples(
        x0 in -2.0f64..2.0, x1 in -2.0f64..2.0,
        y0 in -2.0f64..2.0, y1 in -2.0f64..2.0,
        t in 0.01f64..50.0,
        which in 0usize..4,
    ) {
        let k: GaugeBody<f64> = match which {
            0 => GaugeBody::ball(2, 0.8).unwrap(),
            1 => GaugeBody::boxy(2, [-0.3, -0.9, 0.0], [0.7, 0.4, 0.0]).unwrap(),
            2 => GaugeBody::ellipse(2, [1.2, 0.4, 0.0]).unwrap(),
            _ => GaugeBody::polytope(
                2,
                vec![([1.0, 0.2, 0.0], 0.8), ([-0.5, 1.0, 0.0], 0.6), ([-0.4, -1.0, 0.0], 0.9)],
            )
            .unwrap(),
        };
        let x = [x0, x1, 0.0];
        let y = [y0, y1, 0.0];
        // positive 1-homogeneity
        let g = k.gauge(x);
        let gt = k.gauge([x0 * t, x1 * t, 0.0]);
        prop_assert!((gt - t * g).abs() <= 1e-9 * (1.0 + t * g));
        // duality: x.y <= gauge(x) dual_gauge(y)
        let dot = x0 * y0 + x1 * y1;
        prop_assert!(dot <= k.gauge(x) * k.dual_gauge(y) + 1e-9);
        // scaling body: gauge of rK is gauge/r
        let r = 1.0 + t;
        prop_assert!((k.scale(r).gauge(x) - g / r).abs() <= 1e-9 * (1.0 + g));
    }
}
