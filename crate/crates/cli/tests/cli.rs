use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use swcsp::crossword::parse_puzzle;
use swcsp::format::ProblemFile;
use swcsp_cli::{BenchEntry, Rendering, RunReport};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn swcsp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_swcsp")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Least total cost over the full cross product, with its bindings.
fn enumerate(text: &str) -> Option<(f64, BTreeMap<String, String>)> {
    let file: ProblemFile = serde_json::from_str(text).unwrap();
    let n = file.variables.len();
    let mut best: Option<(f64, BTreeMap<String, String>)> = None;
    let mut idx = vec![0usize; n];
    if file.variables.iter().any(|v| v.domain.is_empty()) {
        return None;
    }
    loop {
        let pick: BTreeMap<String, String> = file
            .variables
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.name.clone(), v.domain[i].clone()))
            .collect();
        let legal = file.constraints.iter().all(|c| {
            let tuple: Vec<&String> = c.scope.iter().map(|s| &pick[s]).collect();
            c.allowed.iter().any(|row| row.iter().zip(&tuple).all(|(a, b)| a == *b))
        });
        if legal {
            let cost: f64 = file
                .unary_costs
                .iter()
                .map(|u| *u.costs.get(&pick[&u.var]).unwrap_or(&u.default))
                .sum();
            if best.as_ref().is_none_or(|(b, _)| cost < *b - 1e-12) {
                best = Some((cost, pick));
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            idx[k] += 1;
            if idx[k] < file.variables[k].domain.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn report(stdout: &str) -> RunReport {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn solve_prints_the_optimum_of_t1() {
    let path = data("t1.json");
    let (best, bindings) = enumerate(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let (code, out, _) = swcsp(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    for (name, value) in &bindings {
        assert_eq!(lines.next().unwrap(), format!("{name} = {value}"));
    }
    assert_eq!(lines.next().unwrap(), format!("cost {best}"));
    let stats: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(stats["cost"].as_f64(), Some(best));
}

#[test]
fn generated_instances_solve_to_the_enumerated_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let mut unsat = 0;
    for seed in 0..10 {
        let (code, text, _) = swcsp(&[
            "gen",
            "--vars",
            "5",
            "--domain",
            "3",
            "--density",
            "0.5",
            "--tightness",
            "0.4",
            "--seed",
            &seed.to_string(),
        ]);
        assert_eq!(code, 0);
        let path = write(&dir, &format!("g{seed}.json"), &text);
        let oracle = enumerate(&text);
        for algo in ["bnb", "lds-post", "andor"] {
            let (code, out, _) = swcsp(&["solve", &path, "--algo", algo, "--iterative", "--json"]);
            let r = report(&out);
            match &oracle {
                Some((best, _)) => {
                    assert_eq!(code, 0, "seed {seed} {algo}");
                    assert!((r.cost.unwrap() - best).abs() < 1e-9, "seed {seed} {algo}");
                    let Some(Rendering::Bindings(b)) = &r.solution else {
                        panic!("bindings expected")
                    };
                    assert_eq!(b.len(), 5);
                }
                None => {
                    assert_eq!(code, 2, "seed {seed} {algo}");
                    assert!(r.solution.is_none() && r.cost.is_none());
                }
            }
        }
        unsat += oracle.is_none() as usize;
    }
    assert!(unsat < 10);
}

#[test]
fn json_reports_round_trip() {
    let (code, out, _) = swcsp(&["solve", data("t1.json").to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    let r = report(&out);
    let again: RunReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);
    assert_eq!(r.cost, r.stats.cost);

    let (_, out, _) = swcsp(&[
        "xw",
        data("cat3/puzzle.txt").to_str().unwrap(),
        "--dict",
        data("cat3/dict.tsv").to_str().unwrap(),
        "--clues",
        data("cat3/clues.tsv").to_str().unwrap(),
        "--limit-minutes",
        "5",
        "--json",
    ]);
    let r = report(&out);
    let again: RunReport = serde_json::from_str(&serde_json::to_string_pretty(&r).unwrap()).unwrap();
    assert_eq!(again, r);
}

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(&dir, "broken.json", "{\"variables\": [");
    assert_eq!(swcsp(&["solve", &broken]).0, 1);
    assert_eq!(swcsp(&["solve", "/no/such/file.json"]).0, 1);
    assert_eq!(swcsp(&["solve", &broken, "--algo", "simplex"]).0, 1);
    assert_eq!(swcsp(&["frobnicate"]).0, 1);

    let triangle = r#"{
        "variables": [{"name": "a", "domain": ["r", "g"]}, {"name": "b", "domain": ["r", "g"]}, {"name": "c", "domain": ["r", "g"]}],
        "constraints": [
            {"scope": ["a", "b"], "allowed": [["r", "g"], ["g", "r"]]},
            {"scope": ["b", "c"], "allowed": [["r", "g"], ["g", "r"]]},
            {"scope": ["a", "c"], "allowed": [["r", "g"], ["g", "r"]]}
        ]
    }"#;
    assert!(enumerate(triangle).is_none());
    let triangle = write(&dir, "triangle.json", triangle);
    let (code, out, _) = swcsp(&["solve", &triangle]);
    assert_eq!((code, out.lines().next()), (2, Some("no solution")));

    let (_, text, _) = swcsp(&[
        "gen",
        "--vars",
        "30",
        "--domain",
        "5",
        "--density",
        "0.1",
        "--tightness",
        "0.1",
        "--seed",
        "1",
    ]);
    let big = write(&dir, "big.json", &text);
    let (code, out, _) = swcsp(&[
        "solve",
        &big,
        "--iterative",
        "--budget-ms",
        "300",
        "--stall-seconds",
        "0",
        "--json",
    ]);
    let r = report(&out);
    assert_eq!(code, 3);
    assert!(r.solution.is_some());
    assert_eq!(r.stats.termination, swcsp::Termination::Budget);
}

#[test]
fn bench_needs_algorithms_and_survives_bad_files() {
    let t1 = data("t1.json");
    let t1 = t1.to_str().unwrap();
    assert_eq!(swcsp(&["bench", t1]).0, 1);
    assert_eq!(swcsp(&["bench", t1, "--algos", ""]).0, 1);
    assert_eq!(swcsp(&["bench", t1, "--algos", "bt,,lds"]).0, 1);

    let dir = tempfile::tempdir().unwrap();
    let broken = write(&dir, "broken.json", "[]");
    let (code, out, _) = swcsp(&["bench", t1, &broken, "--algos", "bt,bnb,lds,lds-post,andor", "--json"]);
    assert_eq!(code, 0);
    let entries: Vec<BenchEntry> = serde_json::from_str(&out).unwrap();
    assert_eq!(entries.len(), 10);
    let (best, _) = enumerate(&std::fs::read_to_string(t1).unwrap()).unwrap();
    for e in &entries[..5] {
        assert!(e.error.is_none());
        assert!(e.nodes > 0);
        if e.algorithm != swcsp::Algorithm::Backtrack {
            assert_eq!(e.cost, Some(best));
        }
    }
    assert!(entries[5..].iter().all(|e| e.error.is_some() && e.cost.is_none()));
}

#[test]
fn gen_is_reproducible() {
    let args = |seed: &'static str| {
        [
            "gen",
            "--kind",
            "disconnected",
            "--left",
            "3",
            "--right",
            "2",
            "--seed",
            seed,
        ]
    };
    let (a, b, c) = (swcsp(&args("5")), swcsp(&args("5")), swcsp(&args("6")));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_ne!(a.1, c.1);
    let file: ProblemFile = serde_json::from_str(&a.1).unwrap();
    assert_eq!(file.variables.len(), 5);
    assert_eq!(swcsp(&["gen", "--density", "2"]).0, 1);
}

fn xw_args<'a>(puzzle: &'a str, dict: &'a str, clues: &'a str) -> Vec<&'a str> {
    vec!["xw", puzzle, "--dict", dict, "--clues", clues]
}

#[test]
fn xw_fills_the_word_square_and_scores_it() {
    let (p, d, c) = (data("cat3/puzzle.txt"), data("cat3/dict.tsv"), data("cat3/clues.tsv"));
    let mut args = xw_args(p.to_str().unwrap(), d.to_str().unwrap(), c.to_str().unwrap());
    args.extend(["--limit-minutes", "5", "--json"]);
    let (code, out, _) = swcsp(&args);
    assert_eq!(code, 0);
    let r = report(&out);
    assert_eq!(
        r.solution,
        Some(Rendering::Grid(vec!["CAT".into(), "AGE".into(), "TEN".into()]))
    );
    assert_eq!((r.words_correct, r.words_total), (Some(6), Some(6)));
    assert_eq!((r.letters_correct, r.letters_total), (Some(9), Some(9)));
    let remaining = (5 * 60_000 - r.elapsed_ms) / 60_000;
    assert_eq!(r.acpt, Some(10 * 6 + 25 * remaining + 150));
    assert_eq!(r.first_mistake_depth, Some(6));
    assert_eq!(r.candidate_cap, Some(5000));

    let dir = tempfile::tempdir().unwrap();
    let key = write(&dir, "key.txt", "CAT\nAGO\nTEN\n");
    args.extend(["--key", &key]);
    let r = report(&swcsp(&args).1);
    assert_eq!((r.words_correct, r.letters_correct), (Some(4), Some(8)));
    let remaining = (5 * 60_000 - r.elapsed_ms) / 60_000;
    let time = (25 * remaining).saturating_sub(25);
    assert_eq!(r.acpt, Some(10 * 4 + time));
}

#[test]
fn xw_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (d, c) = (data("cat3/dict.tsv"), data("cat3/clues.tsv"));
    let short = write(
        &dir,
        "short.txt",
        "GRID\n.#..\n....\n....\nACROSS\n2 a\n4 b\n6 c\nDOWN\n1 d\n2 e\n3 f\n5 g\n",
    );
    let (code, _, err) = swcsp(&xw_args(&short, d.to_str().unwrap(), c.to_str().unwrap()));
    assert_eq!(code, 1);
    assert!(err.contains("invalid grid"), "{err}");
    let bad_dict = write(&dir, "dict.tsv", "CAT\tlots\n");
    let p = data("cat3/puzzle.txt");
    let (code, _, err) = swcsp(&xw_args(p.to_str().unwrap(), &bad_dict, c.to_str().unwrap()));
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
    let key = write(&dir, "key.txt", "CA\nAG\n");
    let mut args = xw_args(p.to_str().unwrap(), d.to_str().unwrap(), c.to_str().unwrap());
    args.extend(["--key", &key]);
    assert_eq!(swcsp(&args).0, 1);
}

#[test]
fn validate_separates_errors_from_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let lopsided = write(
        &dir,
        "a.txt",
        "GRID\n#...\n....\n....\n....\nACROSS\n1 a\n4 b\n5 c\n6 d\nDOWN\n1 e\n2 f\n3 g\n4 h\n",
    );
    let (code, out, _) = swcsp(&["validate", &lopsided]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("warning: ")), "{out}");
    assert!(!out.is_empty());

    let short = write(
        &dir,
        "b.txt",
        "GRID\n.#..\n....\n....\nACROSS\n2 a\n4 b\n6 c\nDOWN\n1 d\n2 e\n3 f\n5 g\n",
    );
    let (code, out, _) = swcsp(&["validate", &short, "--json"]);
    assert_eq!(code, 1);
    let list: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert!(list.iter().any(|v| v["kind"] == "short_run"));
    assert!(list.iter().any(|v| v["kind"] == "uncovered"));

    let (code, out, _) = swcsp(&["validate", data("toy/toy7.txt").to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "ok\n"));
}

/// Depth and (slot, value, answer) steps of a dive.
fn dive(puzzle: &str, key: Option<&str>) -> (usize, Vec<(String, String, String)>) {
    let (d, c) = (data("toy/dict.tsv"), data("toy/clues.tsv"));
    let mut args = vec![
        "first-mistake",
        puzzle,
        "--dict",
        d.to_str().unwrap(),
        "--clues",
        c.to_str().unwrap(),
        "--json",
    ];
    if let Some(k) = key {
        args.extend(["--key", k]);
    }
    let (code, out, err) = swcsp(&args);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let steps = v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            (
                s["slot"].as_str().unwrap().to_string(),
                s["value"].as_str().unwrap().to_string(),
                s["answer"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    (v["depth"].as_u64().unwrap() as usize, steps)
}

#[test]
fn first_mistake_counts_the_correct_prefix() {
    let path = data("toy/toy5a.txt");
    let path = path.to_str().unwrap();
    let puzzle = parse_puzzle(&std::fs::read_to_string(path).unwrap()).unwrap();
    let (depth, steps) = dive(path, None);
    assert_eq!(depth, puzzle.slots.len());
    assert!(steps.iter().all(|(_, value, answer)| value == answer));

    let key_rows: Vec<String> = puzzle.grid.rows();
    let slot = |label: &str| puzzle.slots.iter().find(|s| s.label() == label).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for chosen in [0usize, 2] {
        let earlier: Vec<_> = steps[..chosen].iter().map(|s| slot(&s.0)).collect();
        let target = slot(&steps[chosen].0);
        // a cell whose crossing slot has not been chosen yet
        let &(r, c) = target
            .cells
            .iter()
            .find(|cell| earlier.iter().all(|s| !s.cells.contains(cell)))
            .unwrap();
        let mut rows: Vec<Vec<u8>> = key_rows.iter().map(|r| r.clone().into_bytes()).collect();
        rows[r][c] = if rows[r][c] == b'Z' { b'Y' } else { b'Z' };
        let text: String = rows
            .iter()
            .map(|r| String::from_utf8(r.clone()).unwrap() + "\n")
            .collect();
        let key = write(&dir, &format!("key{chosen}.txt"), &text);
        let (depth, _) = dive(path, Some(&key));
        assert_eq!(depth, chosen);
    }
}
