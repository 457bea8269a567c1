mod common;

use common::{oracle_instance, oracle_outcome};
use ofdm_se::loading::{exhaustive_allocate, greedy_allocate};

#[test]
fn greedy_is_feasible_maximal_and_bounded_on_fifty_instances() {
    let outcomes: Vec<_> = (0..50).map(oracle_outcome).collect();
    for (i, o) in outcomes.iter().enumerate() {
        assert!(o.ok(), "instance {i}: {o:?}");
    }
    let exact = outcomes
        .iter()
        .filter(|o| o.greedy_bits == o.optimal_bits)
        .count();
    assert!(exact >= 25, "greedy optimal on only {exact} of 50");
}

#[test]
fn relaxing_the_target_never_lowers_the_optimum() {
    for i in 0..10 {
        let (snr, c, _) = oracle_instance(i);
        let tight = exhaustive_allocate(&snr, &c, 1e-4).unwrap();
        let loose = exhaustive_allocate(&snr, &c, 1e-2).unwrap();
        assert!(loose.total_bits >= tight.total_bits, "instance {i}");
    }
}

#[test]
fn greedy_is_deterministic() {
    for i in 0..5 {
        let (snr, c, p_t) = oracle_instance(i);
        assert_eq!(
            greedy_allocate(&snr, &c, p_t).unwrap(),
            greedy_allocate(&snr, &c, p_t).unwrap()
        );
    }
}
