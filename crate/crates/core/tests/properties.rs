use fracsym::geometry::{schwarz_rearrange, GridFunction, Lattice};
use fracsym::young::{complementary, YoungFunction};
use proptest::prelude::*;

fn grid(dim: usize) -> impl Strategy<Value = GridFunction> {
    (prop::collection::vec(1usize..12, dim), -5i64..5).prop_flat_map(move |(shape, lo)| {
        let n: usize = shape.iter().product();
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..4.0], n).prop_map(move |values| {
            GridFunction::new(
                Lattice::new(vec![0.25; shape.len()], 0.5).unwrap(),
                vec![lo; shape.len()],
                shape.clone(),
                values,
            )
            .unwrap()
        })
    })
}

fn level_count(u: &GridFunction, t: f64) -> usize {
    u.values().iter().filter(|&&v| v > t).count()
}

proptest! {
    #[test]
    fn level_sets_keep_their_size(u in prop_oneof![grid(1), grid(2)], t in 0.0f64..4.0) {
        let r = schwarz_rearrange(&u).unwrap();
        prop_assert_eq!(level_count(&u, t), level_count(&r, t));
        prop_assert_eq!(u.max_value(), r.max_value());
    }

    #[test]
    fn rearranged_values_do_not_increase_outward(u in grid(2)) {
        let r = schwarz_rearrange(&u).unwrap();
        let mut cells: Vec<(i64, f64)> = (0..r.len())
            .map(|i| (r.index_of(i).iter().map(|k| k * k).sum::<i64>(), r.values()[i]))
            .collect();
        cells.sort_by_key(|a| a.0);
        for w in cells.windows(2) {
            if w[0].0 < w[1].0 {
                prop_assert!(w[0].1 >= w[1].1);
            }
        }
    }

    #[test]
    fn rearrangement_is_monotone(u in grid(1), bump in 0.0f64..1.0) {
        let v = u.map(|x| x + bump * (x > 0.0) as u8 as f64);
        let (ru, rv) = (schwarz_rearrange(&u).unwrap(), schwarz_rearrange(&v).unwrap());
        prop_assert_eq!(ru.lo(), rv.lo());
        for (a, b) in ru.values().iter().zip(rv.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn young_inequality_holds(a in 1e-3f64..1e3, b in 1e-3f64..1e3, which in 0usize..5) {
        let y = YoungFunction::catalog().swap_remove(which);
        let rhs = y.eval(a) + complementary(&y, b).unwrap();
        prop_assert!(a * b <= rhs * (1.0 + 1e-9), "{} : {} > {}", y, a * b, rhs);
    }

    #[test]
    fn young_functions_are_convex(t1 in 1e-4f64..1e2, t2 in 1e-4f64..1e2, theta in 0.0f64..1.0, which in 0usize..5) {
        let y = YoungFunction::catalog().swap_remove(which);
        let mid = y.eval(theta * t1 + (1.0 - theta) * t2);
        let chord = theta * y.eval(t1) + (1.0 - theta) * y.eval(t2);
        prop_assert!(mid <= chord * (1.0 + 1e-12) + 1e-300);
    }
}
