mod common;

use common::{brute_force, engine_sum};
use posterior_lab::numerics::{uniform_stream, RandomStream};

#[test]
fn step_sum_matches_enumeration_on_random_datasets() {
    let mut rs = RandomStream::new(72, 0);
    let mut finite = 0;
    for _ in 0..200 {
        let n = 1 + rs.next_below(4) as usize;
        let xs: Vec<f64> = uniform_stream(&mut rs, n).into_iter().map(|x| x.max(1e-9)).collect();
        for wl in [true, false] {
            let a = engine_sum(&xs, wl);
            let b = brute_force(&xs, wl);
            if b == f64::NEG_INFINITY {
                assert_eq!(a, b, "{xs:?}");
            } else {
                finite += 1;
                assert!((a - b).abs() < 1e-10, "{xs:?}: {a} vs {b}");
            }
        }
    }
    assert!(finite > 100);
}

#[test]
fn enumeration_example_level_two() {
    let xs = [0.1, 0.3, 0.7];
    // level 1 holds no consistent member (k₁ = 2 > 1)
    let a = engine_sum(&xs, true);
    assert!((a.exp() - 0.086847).abs() < 1e-6);
    assert!((a - brute_force(&xs, true)).abs() < 1e-12);
}
