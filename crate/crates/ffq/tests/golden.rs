//! Byte-exact outputs. Set `UPDATE_GOLDEN=1` to rewrite the files.

use std::path::PathBuf;
use std::process::Command;

const CASES: &[(&str, &[&str])] = &[
    ("eval_cycle", &["eval", "--g", "t^-2*x^3", "--M", "2", "--N", "2"]),
    ("eval_f4_json", &["eval", "--field", "2^2", "--g", "(u+1)*t^-1*x^2", "--M", "2", "--n", "u", "--n", "t+u", "--json"]),
    ("decompose_counterexample", &["decompose", "--def", "a=sparse:squares", "--g", "a*x^3 + (t+t^2)*a^2*x^6 + t^-2*x^3", "--M", "3", "--json"]),
    ("ddeg_x7", &["ddeg", "--field", "2", "--g", "x^7"]),
    ("phi_image_index_q", &["phi-image", "--field", "3", "--map", "x - t^2*x^3", "--M", "4", "--json"]),
    ("phi_image_case2", &["phi-image", "--map", "x + (t+t^2)*x^2", "--M", "6"]),
    ("orbit_counterexample", &["orbit", "--def", "a=sparse:squares", "--g", "a*x^3 + (t+t^2)*a^2*x^6 + t^-2*x^3", "--M", "3", "--N", "8", "--json"]),
    ("weyl_repaired", &["weyl", "--def", "a=sparse:squares", "--g", "a*x + t*a^2*x^2 + t^-1*x", "--w", "t^2+1", "--N", "4,6,8", "--json"]),
    ("wd_repaired", &["wd", "--def", "a=sparse:squares", "--g", "a*x + t*a^2*x^2 + t^-1*x", "--M", "3", "--N", "4,6,8,10", "--json"]),
    ("wd_seeded", &["wd", "--field", "3", "--def", "r=rand:seed=42", "--g", "r*x^2", "--M", "2", "--N", "3,4", "--json"]),
    ("components_cycle", &["components", "--g", "t^-2*x^3", "--m", "t^2", "--M", "2", "--N", "3", "--json"]),
    ("apscan_linear", &["apscan", "--def", "a=sparse:squares", "--g", "a*x", "--M", "2", "--N", "4,6", "--m", "t", "--json"]),
    ("intersective_witness_t", &["intersective", "--field", "2", "--q", "x^2+x+1", "--B", "3", "--K", "4", "--json"]),
    ("intersective_certified", &["intersective", "--q", "x+1", "--B", "3", "--K", "4"]),
    ("recur_squares", &["recur", "--config", "tests/data/recur.toml", "--json"]),
    ("partition_random", &["partition", "--q", "x^2+x", "--N", "2", "--coloring", "random:r=3", "--seed", "7", "--json"]),
    ("vdc_squares", &["vdc", "--alpha", "sparse:squares", "--q", "x^2", "--Z", "1", "--N", "6", "--json"]),
    ("error_syntax", &["eval", "--g", "x + * t"]),
];

fn run(args: &[&str], threads: &str) -> (Vec<u8>, i32) {
    let o = Command::new(env!("CARGO_BIN_EXE_ffq"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env("FFQ_THREADS", threads)
        .output()
        .unwrap();
    (o.stdout, o.status.code().unwrap())
}

#[test]
fn outputs_match_golden_files_for_any_thread_count() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in CASES {
        let (out, code) = run(args, "1");
        for threads in ["1", "4"] {
            assert_eq!(run(args, threads), (out.clone(), code), "{name} differs with {threads} threads");
        }
        let mut text = format!("exit {code}\n").into_bytes();
        text.extend_from_slice(&out);
        let path = dir.join(format!("{name}.out"));
        if update {
            std::fs::write(&path, &text).unwrap();
        } else {
            let want = std::fs::read(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert!(want == text, "{name}: output changed\n{}", String::from_utf8_lossy(&text));
        }
    }
}
