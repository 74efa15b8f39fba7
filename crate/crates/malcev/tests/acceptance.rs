//! End-to-end acceptance checks, one per shipped guarantee.
//!
//! Each test prints a single `criterion N (name): pass|fail` line; run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use malcev::algebra::{FiniteAlgebra, FunctionTable, TupleCode};
use malcev::clone::{self, CloneKind};
use malcev::closure::subuniverse_generate;
use malcev::commutator::{
    decompose_commutator_sum, CommutatorLab, CommutatorMethod,
};
use malcev::duality::{cad_enumerate, preserves};
use malcev::partition::{congruence_lattice, Partition};
use malcev::relation::PartialFunction;
use malcev::samples::{cyclic_group, klein_four, symmetric_group_3};
use malcev::witness::{setup_witness, verify_ghost_absent, SumRule};
use malcev::z4::{z4_algebra, z4_cad_enumerate, z4_normal_form_tables, z4_verify_duality, VerifyMode};

const BUDGET: usize = 8_000_000;

fn criterion(n: usize, name: &str, run: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(()) => println!("criterion {n} ({name}): pass"),
        Err(cause) => {
            println!("criterion {n} ({name}): fail");
            resume_unwind(cause);
        }
    }
}

fn term_slice(alg: &FiniteAlgebra, k: usize) -> Vec<FunctionTable> {
    clone::clone_upto(alg, k, CloneKind::Term, BUDGET)
        .unwrap()
        .tables()
        .to_vec()
}

#[test]
fn clone_closure_matches_normal_form_enumeration() {
    criterion(1, "clone oracle equivalence", || {
        let alg = z4_algebra(2);
        for (k, expected) in [(1usize, 16usize), (2, 128)] {
            let mut closed = term_slice(&alg, k);
            closed.sort();
            let mut forms = z4_normal_form_tables(k);
            forms.sort();
            assert_eq!(forms.len(), expected, "normal-form count at arity {k}");
            assert_eq!(closed, forms, "closure vs normal forms at arity {k}");
        }
    });
}

#[test]
fn ternary_clone_gap_between_truncations() {
    criterion(2, "generation gap", || {
        let wide = term_slice(&z4_algebra(3), 3).len();
        let narrow = term_slice(&z4_algebra(2), 3).len();
        assert_eq!(wide, 4096, "ternary clone of the cubing truncation");
        assert_eq!(narrow, 2048, "ternary clone of the squaring truncation");
        assert!(wide > narrow);
    });
}

#[test]
fn commutator_methods_agree_on_nilpotent_algebras() {
    criterion(3, "commutator method agreement", || {
        let algebras = [
            ("doubled-product", z4_algebra(2)),
            ("z4 group", cyclic_group(4)),
            ("klein group", klein_four()),
            ("z6 group", cyclic_group(6)),
        ];
        for (name, alg) in &algebras {
            let lattice = congruence_lattice(alg);
            let lab = CommutatorLab::new(alg, BUDGET);
            let mut tuples: Vec<Vec<Partition>> = Vec::new();
            for a in &lattice {
                for b in &lattice {
                    tuples.push(vec![a.clone(), b.clone()]);
                    for c in &lattice {
                        tuples.push(vec![a.clone(), b.clone(), c.clone()]);
                    }
                }
            }
            for args in &tuples {
                let absorbing = lab
                    .higher_commutator(args, CommutatorMethod::AbsorbingGeneration)
                    .unwrap();
                let nilpotent = lab
                    .higher_commutator(args, CommutatorMethod::NilpotentT)
                    .unwrap();
                assert_eq!(absorbing, nilpotent, "{name}: {args:?}");
            }
        }
    });
}

#[test]
fn nilpotence_classification_of_the_test_algebras() {
    criterion(4, "nilpotence classification", || {
        let alg = z4_algebra(2);
        let lab = CommutatorLab::new(&alg, BUDGET);
        let one = Partition::one(4);
        let mod2 = Partition::from_pairs(4, &[(0, 2), (1, 3)]);
        assert_eq!(lab.nilpotency_class().unwrap(), Some(2));
        assert_eq!(
            lab.higher_commutator(&[one.clone(), one.clone()], CommutatorMethod::AbsorbingGeneration)
                .unwrap(),
            mod2
        );
        assert_eq!(
            lab.higher_commutator(
                &[one.clone(), one.clone(), one.clone()],
                CommutatorMethod::AbsorbingGeneration
            )
            .unwrap(),
            Partition::zero(4)
        );

        let s3 = symmetric_group_3();
        let s3_lab = CommutatorLab::new(&s3, BUDGET);
        assert_eq!(s3_lab.nilpotency_class().unwrap(), None);

        let z4 = cyclic_group(4);
        let z4_lab = CommutatorLab::new(&z4, BUDGET);
        assert_eq!(
            z4_lab
                .higher_commutator(&[one.clone(), one], CommutatorMethod::AbsorbingGeneration)
                .unwrap(),
            Partition::zero(4)
        );
    });
}

#[test]
fn sampled_terms_decompose_into_commutator_sums() {
    criterion(5, "commutator sum identity", || {
        let alg = z4_algebra(2);
        let slices = [term_slice(&alg, 2), term_slice(&alg, 3)];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        for trial in 0..25 {
            let slice = &slices[rng.gen_range(0..slices.len())];
            let f = &slice[rng.gen_range(0..slice.len())];
            let dec = decompose_commutator_sum(&alg, f, None, BUDGET)
                .unwrap_or_else(|err| panic!("trial {trial}: {err}"));
            for c in &dec.terms {
                assert!(
                    clone::commutator_classify(c).is_some(),
                    "trial {trial}: a piece is not a commutator"
                );
            }
            // Re-evaluate the sum identity from the returned pieces alone,
            // at every input.
            let k = f.arity() - 1;
            let total = 4usize.pow(f.arity() as u32);
            for code in 0..total {
                let args = TupleCode { arity: f.arity(), code }.decode(4);
                let z = args[k];
                let mut acc = dec.base.eval(&[z]);
                for (s_set, c) in dec.order.iter().zip(&dec.terms) {
                    let mut c_args: Vec<u8> = s_set.iter().map(|&i| args[i]).collect();
                    c_args.push(z);
                    acc = dec.malcev.eval(&[acc, z, c.eval(&c_args)]);
                }
                assert_eq!(acc, f.eval(&args), "trial {trial}: identity at {args:?}");
            }
        }
    });
}

#[test]
fn every_preserving_partial_operation_extends() {
    criterion(6, "extension verification", || {
        for k in [1usize, 2] {
            let outcome = z4_verify_duality(k, VerifyMode::Full);
            assert_eq!(outcome.domains_scanned, outcome.domains_total, "arity {k}");
            assert!(outcome.counterexamples.is_empty(), "arity {k}");
            assert_eq!(outcome.hom_check_failures, 0, "arity {k}");
            assert!(outcome.functions_preserving > 0, "arity {k}");
            assert_eq!(
                outcome.functions_preserving, outcome.functions_extended,
                "arity {k}"
            );
        }
    });
}

#[test]
fn equation_domains_match_the_closed_form_family() {
    criterion(7, "domain enumeration agreement", || {
        let alg = z4_algebra(2);
        for k in [1usize, 2] {
            let slice = clone::clone_upto(&alg, k, CloneKind::Term, BUDGET).unwrap();
            let by_equations = cad_enumerate(&slice, 100_000).unwrap();
            let mut a: Vec<Vec<usize>> = by_equations
                .iter()
                .map(|d| d.members().iter_codes().collect())
                .collect();
            a.sort();
            let mut b: Vec<Vec<usize>> = z4_cad_enumerate(k)
                .iter()
                .map(|d| d.iter_codes().collect())
                .collect();
            b.sort();
            assert_eq!(a, b, "domain families at arity {k}");
        }
    });
}

#[test]
fn ghost_stays_outside_the_generated_fragment() {
    criterion(8, "ghost witness", || {
        let alg = z4_algebra(2);
        let setup = setup_witness(&alg, &Partition::one(4), -15, 14, BUDGET).unwrap();
        assert_eq!(setup.rule(), SumRule::Alternating);
        assert_eq!(setup.degree(), 2);
        let report = verify_ghost_absent(&setup, 3, 200_000).unwrap();
        assert_eq!(report.violations, 0, "parity violations in the fragment");
        assert!(!report.ghost_found, "ghost generated");
        assert!(report.ghost_applicable);
        assert!(report.ghost_fails_parity);
        assert!(report.depth_completed >= 1);
    });
}

#[test]
fn term_restrictions_preserve_random_subuniverses() {
    criterion(9, "preservation sanity", || {
        let algebras = [z4_algebra(2), cyclic_group(4), klein_four(), cyclic_group(6)];
        let slices: Vec<[Vec<FunctionTable>; 2]> = algebras
            .iter()
            .map(|alg| [term_slice(alg, 1), term_slice(alg, 2)])
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
        for trial in 0..100 {
            let which = trial % algebras.len();
            let alg = &algebras[which];
            let size = alg.size();
            let k = rng.gen_range(1..=2usize);
            let slice = &slices[which][k - 1];
            let f = &slice[rng.gen_range(0..slice.len())];
            let power = rng.gen_range(1..=3usize);
            let gens: Vec<Vec<u8>> = (0..rng.gen_range(1..=2usize))
                .map(|_| (0..power).map(|_| rng.gen_range(0..size) as u8).collect())
                .collect();
            let sub = subuniverse_generate(alg, power, &gens).unwrap();
            let universe = size.pow(k as u32);
            let mut dom = Vec::new();
            let mut values = Vec::new();
            for code in 0..universe {
                if rng.gen_bool(0.5) {
                    dom.push(code);
                    values.push(f.eval_code(code));
                }
            }
            let restriction = PartialFunction::from_codes(size, k, &dom, &values);
            assert!(
                preserves(&restriction, &sub),
                "trial {trial}: restriction of a term failed to preserve"
            );
        }
    });
}

#[test]
fn cli_reports_are_byte_identical_across_runs() {
    criterion(10, "cli determinism", || {
        let exe = env!("CARGO_BIN_EXE_malcev");
        let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let path = |name: &str| -> String {
            data.join(name).to_str().unwrap().to_owned()
        };
        let runs: Vec<Vec<String>> = vec![
            vec![
                "clone".into(),
                "--algebra".into(),
                path("z4-trunc2.json"),
                "--arity".into(),
                "2".into(),
                "--kind".into(),
                "term".into(),
                "--emit-tables".into(),
                "--find-malcev".into(),
            ],
            vec![
                "commutators".into(),
                "--algebra".into(),
                path("z4-group.json"),
                "--cap".into(),
                "3".into(),
            ],
            vec![
                "dualize-scan".into(),
                "--algebra".into(),
                path("z4-group.json"),
                "--max-arity".into(),
                "2".into(),
                "--subpower".into(),
                "4".into(),
            ],
            vec![
                "z4-verify".into(),
                "--arity".into(),
                "1".into(),
                "--emit-clone".into(),
            ],
            vec![
                "witness".into(),
                "--algebra".into(),
                path("z4-trunc2.json"),
                "--window".into(),
                "26".into(),
                "--depth".into(),
                "1".into(),
                "--element-budget".into(),
                "5000".into(),
            ],
        ];
        for args in &runs {
            let invoke = || {
                Command::new(exe)
                    .args(args)
                    .args(["--budget", "8000000"])
                    .env_remove("MALCEV_BUDGET")
                    .output()
                    .unwrap()
            };
            let first = invoke();
            let second = invoke();
            assert_eq!(
                first.status.code(),
                Some(0),
                "{}: {}",
                args[0],
                String::from_utf8_lossy(&first.stderr)
            );
            assert_eq!(first.status.code(), second.status.code(), "{}", args[0]);
            assert!(first.stderr.is_empty(), "{}", args[0]);
            assert!(!first.stdout.is_empty(), "{}", args[0]);
            assert_eq!(first.stdout, second.stdout, "{}: reports differ", args[0]);
        }
    });
}
