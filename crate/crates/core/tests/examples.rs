//! Runs every program in `examples/` and checks what it reports.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));
        }
    };
}

example!(overlap_and_gram);
example!(membership_equiangular);
example!(counterexample);
example!(reconstruct_witness);
example!(edm_exponential);
example!(real_positive_fast_path);
example!(closure_blocks);
example!(block_approximation);
example!(small_angle);

#[test]
fn overlap_and_gram_is_gauge_invariant() {
    assert!(overlap_and_gram::run().unwrap() < 1e-12);
}

#[test]
fn equiangular_witnesses_are_exact() {
    assert!(membership_equiangular::run().unwrap() < 1e-8);
}

#[test]
fn counterexample_passes_necessary_check_only() {
    assert_eq!(counterexample::run().unwrap(), (true, false));
}

#[test]
fn reconstruction_round_trips() {
    let (error, rank) = reconstruct_witness::run().unwrap();
    assert!(error < 1e-8);
    assert!(rank <= 4);
}

#[test]
fn edm_exponential_is_psd() {
    let (lo, error) = edm_exponential::run().unwrap();
    assert!(lo >= -1e-9);
    assert!(error < 1e-8);
}

#[test]
fn fast_path_agrees() {
    let verdicts = real_positive_fast_path::run().unwrap();
    assert_eq!(verdicts, vec![(true, true), (false, false), (true, true)]);
}

#[test]
fn closure_examples() {
    assert_eq!(closure_blocks::run().unwrap(), (true, false, true));
}

#[test]
fn block_approximation_meets_targets() {
    for (eps, error) in block_approximation::run().unwrap() {
        assert!(error <= eps);
    }
}

#[test]
fn small_angle_error_is_quadratic() {
    for (gap, error) in small_angle::run().unwrap() {
        assert!(error <= gap * gap);
    }
}
