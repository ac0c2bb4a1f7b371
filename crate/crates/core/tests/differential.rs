mod common;

use std::sync::Arc;

use ddc_core::oracle::{
    answer_variant, compare, cut_corpus, difftest_seed, gen_program, sld_solve, DiffOutcome,
    GenParams, OracleConfig,
};
use ddc_core::reader::parse_query;
use ddc_core::toplevel::solve_all;

use common::{big_stack, database, engine};

fn check_seeds(seeds: std::ops::Range<u64>, params: GenParams) -> (usize, usize) {
    let cfg = OracleConfig::default();
    let mut complete = 0;
    let mut answers = 0;
    for seed in seeds {
        match difftest_seed(seed, &params, &cfg) {
            DiffOutcome::Agree {
                answers: n,
                complete: c,
            } => {
                complete += usize::from(c);
                answers += n;
            }
            other => {
                let g = gen_program(seed, &params);
                panic!("seed {seed}: {other:?}\n{}?- {}", g.program, g.query);
            }
        }
    }
    (complete, answers)
}

#[test]
fn generated_definite_programs_agree() {
    let (complete, answers) = big_stack(|| check_seeds(0..1000, GenParams::default()));
    assert!(
        complete >= 990,
        "only {complete} of 1000 programs ran to completion"
    );
    assert!(answers > 1000, "corpus too thin: {answers} answers");
}

#[test]
fn generated_programs_with_if_then_else_agree() {
    let params = GenParams {
        if_then_else: true,
        ..GenParams::default()
    };
    let (complete, _) = big_stack(move || check_seeds(5000..5400, params));
    assert!(complete >= 390);
}

#[test]
fn every_engine_answer_is_an_oracle_answer() {
    big_stack(|| {
        let params = GenParams::default();
        for seed in 0..200 {
            let g = gen_program(seed, &params);
            let db = database(&[], &g.program);
            let query = parse_query(&g.query).unwrap();
            let oracle = sld_solve(&db, &query, &OracleConfig::default());
            let mut e = engine(&[], &g.program);
            for a in solve_all(&mut e, &g.query).unwrap() {
                assert!(
                    oracle.answers.iter().any(|o| answer_variant(&a, o)),
                    "seed {seed}: {a} not derivable"
                );
            }
        }
    });
}

#[test]
fn seed_zero_matches_golden_file() {
    let golden = include_str!("golden/gen_seed0.pl");
    let g = gen_program(0, &GenParams::default());
    assert_eq!(format!("{}% ?- {}.\n", g.program, g.query), golden);
}

#[test]
fn translated_cut_matches_real_cut() {
    big_stack(|| {
        let real = OracleConfig {
            real_cut: true,
            ..OracleConfig::default()
        };
        let mut pruned = 0;
        for (i, p) in cut_corpus(40).into_iter().enumerate() {
            let query = parse_query(&p.query).unwrap();
            let expected = sld_solve(&database(&[], &p.source), &query, &real);
            assert!(expected.exhausted());
            let transparent =
                sld_solve(&database(&[], &p.source), &query, &OracleConfig::default());
            pruned += usize::from(transparent.answers.len() != expected.answers.len());
            // The engine runs the translation; the oracle the original.
            let translated = Arc::new(database(&["cut"], &p.translated));
            let engine_answers: Vec<_> = {
                let mut e = ddc_core::engine::Engine::new(translated.clone());
                solve_all(&mut e, &p.query)
                    .unwrap_or_else(|e| panic!("program {i}: {e}\n{}", p.translated))
            };
            assert!(
                ddc_core::oracle::answers_equiv(&engine_answers, &expected.answers),
                "program {i}\n{}\n{}\nengine: {:?}\noracle: {:?}",
                p.source,
                p.translated,
                engine_answers
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
                expected
                    .answers
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            );
        }
        assert!(pruned >= 10, "cut pruned answers in only {pruned} programs");
    });
}

#[test]
fn compare_reports_engine_extras() {
    // A database with a shift is outside the oracle's language.
    let db = Arc::new(database(&[], "p :- shift(a).\n"));
    let q = parse_query("p").unwrap();
    assert!(matches!(
        compare(db, &q, &OracleConfig::default()),
        DiffOutcome::OracleError(_)
    ));
}
