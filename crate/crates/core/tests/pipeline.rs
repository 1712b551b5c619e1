use proptest::prelude::*;
use tnkit_core::builders::{build_mera_1d, build_mera_2d_b2, build_mera_2d_b3, BuildOptions};
use tnkit_core::dense::{contract_peps, contract_tns, overlap, ContractOptions};
use tnkit_core::mapping::{
    assemble_peps, contract_refined_to_normal, grid_violations, measured_chi, place_refined,
    place_shifted, route_lines, validate_paths, Assembly, RefinedOffsets,
};
use tnkit_core::tns::{validate_preconditions, Tns};

fn round_trip(tns: &Tns, refined: bool) -> f64 {
    let opts = ContractOptions::default();
    let psi = contract_tns(tns, &opts).unwrap();
    let p = if refined {
        let off = if tns.spec.branching == 3 {
            RefinedOffsets::mera_2d_b3()
        } else {
            RefinedOffsets::mera_2d_b2()
        };
        place_refined(tns, 1, &off).unwrap()
    } else {
        place_shifted(tns)
    };
    let paths = route_lines(tns, &p).unwrap();
    let peps = assemble_peps(
        tns,
        &p,
        &paths,
        Assembly::Dense {
            max_amplitudes: opts.max_amplitudes,
        },
    )
    .unwrap();
    let peps = if refined {
        contract_refined_to_normal(&peps, 1, opts.max_amplitudes).unwrap()
    } else {
        peps
    };
    overlap(&psi, &contract_peps(&peps, &opts).unwrap())
}

#[test]
fn b3_single_layer_maps_exactly() {
    let tns = build_mera_2d_b3(1, &BuildOptions::numeric(2, 4)).unwrap();
    assert!(validate_preconditions(&tns).is_ok());
    assert!(round_trip(&tns, false) > 1.0 - 1e-10);
    assert!(round_trip(&tns, true) > 1.0 - 1e-10);
}

#[test]
fn symbolic_and_measured_bonds_agree() {
    let tns = build_mera_2d_b3(2, &BuildOptions::symbolic(2)).unwrap();
    let p = place_shifted(&tns);
    let paths = route_lines(&tns, &p).unwrap();
    let peps = assemble_peps(&tns, &p, &paths, Assembly::Symbolic).unwrap();
    assert_eq!(peps.chi_peps(), measured_chi(&tns, &paths).chi_peps);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_mera_1d_states_survive(seed in any::<u64>(), layers in 1usize..=3) {
        let tns = build_mera_1d(layers, &BuildOptions::numeric(2, seed)).unwrap();
        prop_assert!(round_trip(&tns, false) > 1.0 - 1e-10);
    }

    #[test]
    fn random_b2_states_survive_refinement(seed in any::<u64>()) {
        let tns = build_mera_2d_b2(1, &BuildOptions::numeric(2, seed)).unwrap();
        prop_assert!(round_trip(&tns, true) > 1.0 - 1e-10);
    }

    #[test]
    fn routed_paths_are_valid(layers in 1usize..=4, b3 in any::<bool>(), refined in any::<bool>()) {
        let opts = BuildOptions::symbolic(2);
        let tns = if b3 { build_mera_2d_b3(layers.min(3), &opts) } else { build_mera_2d_b2(layers, &opts) }.unwrap();
        let p = if refined {
            let off = if b3 { RefinedOffsets::mera_2d_b3() } else { RefinedOffsets::mera_2d_b2() };
            place_refined(&tns, 1, &off).unwrap()
        } else {
            place_shifted(&tns)
        };
        let paths = route_lines(&tns, &p).unwrap();
        prop_assert!(validate_paths(&tns, &p, &paths).is_ok());
        prop_assert!(grid_violations(&tns, &paths).is_empty());
    }
}
