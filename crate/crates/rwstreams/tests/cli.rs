use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwstreams::RunReport;
use tempfile::TempDir;

fn rws(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rws"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> Vec<u8> {
    let out = rws(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn code(args: &[&str], dir: &Path) -> i32 {
    rws(args, dir).status.code().unwrap()
}

fn text_sample(len: usize) -> Vec<u8> {
    let words = ["the ", "stream ", "of ", "records ", "moves ", "once ", "per ", "pass, ", "and ", "sorting\n"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::with_capacity(len + 16);
    while out.len() < len {
        out.extend_from_slice(words[rng.gen_range(0..words.len())].as_bytes());
    }
    out.truncate(len);
    out
}

#[test]
fn eo_round_trip_on_a_megabyte() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), text_sample(1 << 20)).unwrap();
    ok(&["eo-compress", "in", "-o", "in.rwse", "--report", "c.json"], dir.path());
    ok(&["eo-decompress", "in.rwse", "-o", "out", "--report", "d.json"], dir.path());
    assert_eq!(std::fs::read(dir.path().join("in")).unwrap(), std::fs::read(dir.path().join("out")).unwrap());
    let report: RunReport = serde_json::from_slice(&std::fs::read(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(report.command, "eo-compress");
    assert!(report.usage.peak_declared_memory_bits <= report.budget.memory_bits);
    assert!(report.details["output_bits"].as_u64().unwrap() < 8 << 20);
}

#[test]
fn block_compressor_round_trip() {
    let dir = TempDir::new().unwrap();
    let data = text_sample(50_000);
    std::fs::write(dir.path().join("in"), &data).unwrap();
    let packed = ok(&["compress", "in", "--report", "r.json"], dir.path());
    assert_eq!(&packed[..4], b"RWS1");
    std::fs::write(dir.path().join("in.rws"), &packed).unwrap();
    assert_eq!(ok(&["decompress", "in.rws"], dir.path()), data);
    let report: RunReport = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report.usage.total_passes, 1);

    let args = ["compress", "in", "--block-size", "4096", "--k-max", "1"];
    assert_eq!(code(&args, dir.path()), 3);
    let packed = ok(&[&args[..], &["--memory-bits", "2000000"]].concat(), dir.path());
    std::fs::write(dir.path().join("in.rws"), &packed).unwrap();
    assert_eq!(ok(&["decompress", "in.rws"], dir.path()), data);
}

#[test]
fn bwt_then_unbwt() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), b"banana").unwrap();
    ok(&["bwt", "in", "-o", "in.bwt"], dir.path());
    let snap = rwstreams::format::read_snapshot(&std::fs::read(dir.path().join("in.bwt")).unwrap()).unwrap();
    let ascii: Vec<u8> = snap.records.iter().map(|&r| if r == 0 { b'$' } else { r as u8 - 1 }).collect();
    assert_eq!(ascii, b"annb$aa");
    assert_eq!(ok(&["unbwt", "in.bwt"], dir.path()), b"banana");
}

#[test]
fn one_stream_cannot_compute_the_bwt() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), b"banana").unwrap();
    assert_eq!(code(&["bwt", "in", "--streams", "1"], dir.path()), 3);
}

#[test]
fn de_bruijn_output() {
    let dir = TempDir::new().unwrap();
    assert_eq!(ok(&["debruijn", "--sigma", "2", "--k", "3", "--count"], dir.path()), b"2\n");
    assert_eq!(ok(&["debruijn", "--sigma", "3", "--k", "2", "--count"], dir.path()), b"24\n");
    let cycle = ok(&["debruijn", "--sigma", "2", "--k", "3"], dir.path());
    assert!(cycle == b"00010111" || cycle == b"00011101");
    let long = ok(&["debruijn", "--sigma", "2", "--k", "3", "--repeat-to", "20"], dir.path());
    assert_eq!(long, cycle.repeat(3)[..20]);
}

#[test]
fn period_and_grammar() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), b"abcabcabcab").unwrap();
    assert_eq!(ok(&["period", "in"], dir.path()), b"3\n");
    ok(&["grammar", "in", "-o", "g.txt"], dir.path());
    let g = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert!(g.starts_with("N0: N1 N3\n"));
    assert_eq!(ok(&["grammar", "--expand", "g.txt"], dir.path()), b"abcabcabcab");
}

#[test]
fn entropy_table() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), b"abababab").unwrap();
    let out = String::from_utf8(ok(&["entropy", "in", "--k", "1"], dir.path())).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k\tH_k\tH_k*_total");
    assert!(lines[1].starts_with("0\t1.000000"));
    assert!(lines[2].starts_with("1\t0.000000"));
}

#[test]
fn sortnums() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), "5 3\n12 3 1000 0").unwrap();
    assert_eq!(ok(&["sortnums", "in"], dir.path()), b"0\n3\n3\n5\n12\n1000\n");
    std::fs::write(dir.path().join("bad"), "5 -3").unwrap();
    assert_eq!(code(&["sortnums", "bad"], dir.path()), 2);
}

#[test]
fn reports_respect_the_flags() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), text_sample(5000)).unwrap();
    let args = ["bwt", "in", "-o", "o", "--memory-bits", "20000", "--pass-limit", "2000", "--report", "r.json"];
    ok(&args, dir.path());
    let r: RunReport = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(r.usage.peak_declared_memory_bits <= 20000);
    assert!(r.usage.total_passes <= 2000);
    assert_eq!(code(&["bwt", "in", "--pass-limit", "10"], dir.path()), 4);
    assert_eq!(code(&["bwt", "in", "--memory-bits", "50"], dir.path()), 3);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), b"hello").unwrap();
    assert_eq!(code(&["compress"], dir.path()), 2);
    assert_eq!(code(&["compress", "in", "--block-size", "0"], dir.path()), 2);
    assert_eq!(code(&["compress", "in", "--block-size", "16", "--k-max", "3"], dir.path()), 2);
    assert_eq!(code(&["compress", "in", "--sigma", "100"], dir.path()), 2);
    assert_eq!(code(&["debruijn", "--sigma", "1", "--k", "2"], dir.path()), 2);
    assert_eq!(code(&["decompress", "missing"], dir.path()), 1);
    assert_eq!(code(&["decompress", "in"], dir.path()), 5);
    assert_eq!(code(&["eo-decompress", "in"], dir.path()), 5);

    ok(&["eo-compress", "in", "-o", "in.rwse"], dir.path());
    let mut eo = std::fs::read(dir.path().join("in.rwse")).unwrap();
    let last = eo.len() - 1;
    eo[last] ^= 0x40;
    std::fs::write(dir.path().join("bad.rwse"), &eo).unwrap();
    let c = code(&["eo-decompress", "bad.rwse"], dir.path());
    assert!(c == 6 || c == 0, "{c}");

    // "a$b" is no BWT image.
    let snap = rwstreams::format::Snapshot {
        record_bits: 8,
        records: vec![98, 0, 99],
    };
    std::fs::write(dir.path().join("bad.bwt"), rwstreams::format::write_snapshot(&snap)).unwrap();
    assert_eq!(code(&["unbwt", "bad.bwt"], dir.path()), 6);
}

#[test]
fn deterministic_output() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in"), text_sample(20_000)).unwrap();
    for cmd in ["compress", "eo-compress", "bwt"] {
        assert_eq!(ok(&[cmd, "in"], dir.path()), ok(&[cmd, "in", "--seed", "9"], dir.path()));
    }
}
