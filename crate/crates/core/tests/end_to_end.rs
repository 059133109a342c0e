use proptest::prelude::*;
use rwstreams_core::bwt::{
    bwt_forward, bwt_inverse, bwt_logspace_oracle, entropy_only_compress, entropy_only_decompress,
};
use rwstreams_core::debruijn::{adversarial_string, generate_cycle};
use rwstreams_core::entropy::hk;
use rwstreams_core::grammar::build_periodic_grammar;
use rwstreams_core::period::{min_period_oracle, min_period_streams};
use rwstreams_core::reduction::{sort_via_bwt, SortInstance};
use rwstreams_core::universal::{compress, decompress, BlockSchedule};
use rwstreams_core::{Machine, MachineBudget, Symbol};

fn polylog(n: usize) -> Machine {
    Machine::new(MachineBudget::polylog(n as u64))
}

#[test]
fn periodic_text_through_every_stage() {
    let unit: Vec<Symbol> = vec![2, 0, 1, 1, 0];
    let s: Vec<Symbol> = unit.iter().copied().cycle().take(4003).collect();

    let l = min_period_streams(&mut polylog(s.len()), &s).unwrap();
    assert_eq!(l, 5);
    let g = build_periodic_grammar(&s, l, 3).unwrap();
    assert_eq!(g.expand().unwrap(), s);

    let t = bwt_forward(&mut polylog(s.len()), &s).unwrap();
    assert_eq!(t, bwt_logspace_oracle(&s));
    assert_eq!(bwt_inverse(&mut polylog(s.len()), &t).unwrap(), s);

    let eo = entropy_only_compress(&mut polylog(s.len()), &s, 3).unwrap();
    assert!(eo.payload.len() < 400, "{} bits", eo.payload.len());
    assert_eq!(entropy_only_decompress(&mut polylog(s.len()), &eo).unwrap(), s);
}

#[test]
fn de_bruijn_powers_are_cheap_for_the_bwt_pipeline_only() {
    let s = adversarial_string(4, 3, 1 << 14).unwrap();
    assert_eq!(hk(&s, 3).unwrap(), 0.0);
    assert_eq!(s.len(), 1 << 14);
    assert!(generate_cycle(4, 3).unwrap().is_valid());

    let eo = entropy_only_compress(&mut polylog(s.len()), &s, 4).unwrap();
    let mut m = polylog(s.len());
    let input = m.attach_stream(s.iter().map(|&x| u128::from(x)), 2).unwrap();
    let blocks = compress(&mut m, input, 4, BlockSchedule::Fixed(196), 1).unwrap();
    assert!(eo.payload.len() as u64 * 10 < blocks.payload_bits());
    assert_eq!(decompress(&blocks).unwrap(), s);
}

#[test]
fn sorting_through_the_bwt() {
    let inst = SortInstance::new(vec![9, 3, 14, 3, 0, 7, 15, 1, 2, 11, 4, 4, 8, 6, 13, 5]).unwrap();
    let mut want = inst.values().to_vec();
    want.sort_unstable();
    let got = sort_via_bwt(&mut polylog(inst.encoded_len() as usize), &inst).unwrap();
    assert_eq!(got, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stream_period_matches_oracle(unit in proptest::collection::vec(0u32..3, 1..12), reps in 1usize..20) {
        let s: Vec<Symbol> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
        prop_assert_eq!(
            min_period_streams(&mut polylog(s.len()), &s).unwrap(),
            min_period_oracle(&s).unwrap()
        );
    }

    #[test]
    fn codecs_round_trip(s in proptest::collection::vec(0u32..6, 0..600)) {
        let eo = entropy_only_compress(&mut polylog(s.len()), &s, 6).unwrap();
        prop_assert_eq!(entropy_only_decompress(&mut polylog(s.len()), &eo).unwrap(), s.clone());

        let mut m = Machine::new(MachineBudget::new(1 << 20, 2));
        let input = m.attach_stream(s.iter().map(|&x| u128::from(x)), 3).unwrap();
        let c = compress(&mut m, input, 6, BlockSchedule::Growing(64), 1).unwrap();
        prop_assert_eq!(decompress(&c).unwrap(), s);
    }
}
