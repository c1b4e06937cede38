use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netdesign(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netdesign"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn copies_graph_round_trip_through_qc_check() {
    let dir = tempfile::tempdir().unwrap();
    for base in ["edge", "path3", "triangle"] {
        let out = netdesign(
            &[
                "gen-graph",
                "--family",
                "copies",
                "--base",
                base,
                "--output",
                "g.txt",
                "--qc-out",
                "q.txt",
                "--types-out",
                "t.txt",
            ],
            dir.path(),
        );
        stdout(&out);
        let plain = stdout(&netdesign(
            &["qc-check", "--graph", "g.txt", "--treatment", "q.txt"],
            dir.path(),
        ));
        assert_eq!(plain.lines().next(), Some("perfect"), "{base}");
        // a perfect coloring has no bidegree atoms
        assert_eq!(plain.lines().count(), 1);
        let typed = stdout(&netdesign(
            &[
                "qc-check",
                "--graph",
                "g.txt",
                "--treatment",
                "q.txt",
                "--types",
                "t.txt",
            ],
            dir.path(),
        ));
        assert_eq!(typed.trim(), "perfect");
    }
}

#[test]
fn qc_find_square_and_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("hex.txt"),
        "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n",
    )
    .unwrap();
    fs::write(dir.path().join("sq.txt"), "4 4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
    assert_eq!(
        stdout(&netdesign(&["qc-find", "--graph", "hex.txt"], dir.path())).trim(),
        "NONE"
    );
    assert_eq!(
        stdout(&netdesign(&["qc-find", "--graph", "sq.txt"], dir.path())).trim(),
        "0 1"
    );
    fs::write(dir.path().join("diag.txt"), "0\n2\n").unwrap();
    let out = stdout(&netdesign(
        &["qc-check", "--graph", "sq.txt", "--treatment", "diag.txt"],
        dir.path(),
    ));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["not perfect", "0 2 1", "2 0 -1"]);
}

#[test]
fn design_draws_half_of_the_vertices() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&netdesign(
        &[
            "gen-graph",
            "--family",
            "pa",
            "--vertices",
            "30",
            "--output",
            "g.txt",
        ],
        dir.path(),
    ));
    for design in ["crd", "pbd", "pbd-random", "typed"] {
        let out = stdout(&netdesign(
            &[
                "design",
                "--graph",
                "g.txt",
                "--design",
                design,
                "--blocks-out",
                "b.txt",
            ],
            dir.path(),
        ));
        assert_eq!(out.lines().count(), 15, "{design}");
        let blocks = fs::read_to_string(dir.path().join("b.txt")).unwrap();
        let covered: usize = blocks.lines().map(|l| l.split_whitespace().count()).sum();
        assert_eq!(covered, 30);
    }
}

#[test]
fn bounds_report_lists_every_design() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("hex.txt"),
        "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n",
    )
    .unwrap();
    let out = stdout(&netdesign(
        &[
            "bounds",
            "--graph",
            "hex.txt",
            "--interference",
            "normalized-linear",
            "--sigma",
            "0.5",
        ],
        dir.path(),
    ));
    let names: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "crd",
            "pbd",
            "pbd-random",
            "typed",
            "pbd-dense",
            "homophily"
        ]
    );
    assert!(out.starts_with("design,bias_bound,"));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["simulate", "--vertices", "101"],
        &["simulate", "--design", "bogus"],
        &["qc-find", "--graph", "missing.txt"],
        &["sweep", "--config", "missing.toml"],
    ];
    for args in cases {
        let out = netdesign(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    // clap's own usage errors use the same code
    assert_eq!(
        netdesign(&["simulate", "--replications", "x"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "family = \"pa\"\nvertices = 40\nm = 2\ndesign = \"pbd-random\"\nreplications = 100\n",
    )
    .unwrap();
    let out = stdout(&netdesign(
        &["simulate", "--config", "run.toml", "--gamma", "0.5"],
        dir.path(),
    ));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(
        &row[..7],
        ["pa", "40", "1", "2", "0.5", "pbd-random", "100"]
    );
}

#[test]
fn sweep_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sweep.toml"),
        "family = \"pa\"\nvertices = [40]\npows = [1.0]\nms = [1, 2]\ngammas = [0.5, 1.0]\n\
         designs = [\"crd\", \"pbd\", \"pbd-random\"]\nreplications = 100\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let name = format!("out{threads}.csv");
        stdout(&netdesign(
            &[
                "--threads",
                threads,
                "sweep",
                "--config",
                "sweep.toml",
                "--output",
                &name,
            ],
            dir.path(),
        ));
        outputs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
}
