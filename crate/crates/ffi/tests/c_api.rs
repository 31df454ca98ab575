use std::ffi::{c_char, CStr, CString};
use std::ptr;

use contact_meta_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    unsafe { cpm_last_error_message(buf.as_mut_ptr().cast::<c_char>(), buf.len()) };
    CStr::from_bytes_until_nul(&buf).unwrap().to_str().unwrap().to_string()
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cpm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn graph_lifecycle_and_cuts() {
    // two triangles joined by one edge
    let us = [0usize, 0, 1, 3, 3, 4, 2];
    let vs = [1usize, 2, 2, 4, 5, 5, 3];
    let mut g: *mut CpmGraph = ptr::null_mut();
    unsafe {
        assert_eq!(cpm_graph_from_edges(6, us.as_ptr(), vs.as_ptr(), us.len(), &mut g), CpmStatus::Ok);
        let (mut n, mut m) = (0usize, 0u64);
        assert_eq!(cpm_graph_node_count(g, &mut n), CpmStatus::Ok);
        assert_eq!(cpm_graph_edge_count(g, &mut m), CpmStatus::Ok);
        assert_eq!((n, m), (6, 7));
        let nodes = [0usize, 1, 2];
        let mut cut = 0u64;
        assert_eq!(cpm_graph_cut_size(g, nodes.as_ptr(), 3, &mut cut), CpmStatus::Ok);
        assert_eq!(cut, 1);
        let mut witness = [0usize; 3];
        assert_eq!(cpm_graph_min_cut(g, 3, 1000, &mut cut, witness.as_mut_ptr()), CpmStatus::Ok);
        assert_eq!(cut, 1);
        witness.sort();
        assert!(witness == [0, 1, 2] || witness == [3, 4, 5]);
        assert_eq!(cpm_graph_min_cut(g, 3, 2, &mut cut, ptr::null_mut()), CpmStatus::BudgetExceeded);
        assert!(last_error().contains("budget"));
        cpm_graph_free(g);
        cpm_graph_free(ptr::null_mut());
    }
}

#[test]
fn generators_are_seeded() {
    let dist = CString::new("constant:3").unwrap();
    unsafe {
        let (mut a, mut b): (*mut CpmGraph, *mut CpmGraph) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cpm_graph_configuration(100, dist.as_ptr(), 9, &mut a), CpmStatus::Ok);
        assert_eq!(cpm_graph_configuration(100, dist.as_ptr(), 9, &mut b), CpmStatus::Ok);
        let (mut ma, mut mb) = (0u64, 0u64);
        cpm_graph_edge_count(a, &mut ma);
        cpm_graph_edge_count(b, &mut mb);
        assert_eq!(ma, mb);
        assert!(ma <= 150);
        cpm_graph_free(a);
        cpm_graph_free(b);
        let mut g: *mut CpmGraph = ptr::null_mut();
        assert_eq!(cpm_graph_erdos_renyi(30, 1.0, 1, &mut g), CpmStatus::Ok);
        let mut m = 0u64;
        cpm_graph_edge_count(g, &mut m);
        assert_eq!(m, 435);
        cpm_graph_free(g);
        assert_eq!(cpm_graph_erdos_renyi(30, 1.5, 1, &mut g), CpmStatus::InvalidParameter);
    }
}

#[test]
fn read_edge_list_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "# comment\nnodes 3\n0 1 2\n1 2 1\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut g: *mut CpmGraph = ptr::null_mut();
    unsafe {
        assert_eq!(cpm_graph_read(c.as_ptr(), &mut g), CpmStatus::Ok);
        let mut m = 0u64;
        cpm_graph_edge_count(g, &mut m);
        assert_eq!(m, 3);
        cpm_graph_free(g);
        let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
        assert_eq!(cpm_graph_read(missing.as_ptr(), &mut g), CpmStatus::IoError);
        std::fs::write(&path, "nodes 2\n0 5 1\n").unwrap();
        assert_eq!(cpm_graph_read(c.as_ptr(), &mut g), CpmStatus::InvalidParameter);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(cpm_phi(1.0, 1.0, 0.0, &mut x), CpmStatus::Ok);
        assert!((x - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(cpm_phi(-1.0, 1.0, 0.0, &mut x), CpmStatus::InvalidParameter);
        // one stub on each side: they always pair with each other
        assert_eq!(cpm_ln_mixed_pair_prob(1, 1, 1, &mut x), CpmStatus::Ok);
        assert!(x.abs() < 1e-12);
        assert_eq!(cpm_tail_bound(10, 10, 3, &mut x), CpmStatus::Ok);
        assert!(x > 0.0);
        assert_eq!(cpm_complete_graph_log_extinction(2, 1.0, &mut x), CpmStatus::Ok);
        // K2 with per-edge rate 1/2: H_2 = 1/2 + H_1 and H_1 = 2/3 + H_2/3,
        // so H_1 = 5/4 and H_2 = 7/4
        assert!((x - 1.75f64.ln()).abs() < 1e-12, "{}", x.exp());
        assert_eq!(cpm_sparse_er_tau0(2.0, &mut x), CpmStatus::Inapplicable);
        assert_eq!(cpm_sparse_er_tau0(10.0, &mut x), CpmStatus::Ok);
        assert!(x * 10.0 > 1.0);
        let d = CString::new("constant:5").unwrap();
        assert_eq!(cpm_mu0(d.as_ptr(), 0, &mut x), CpmStatus::Ok);
        assert!(x > 2.3 && x < 3.0);
        let d = CString::new("weird:5").unwrap();
        assert_eq!(cpm_mu0(d.as_ptr(), 0, &mut x), CpmStatus::InvalidParameter);
        assert_eq!(cpm_phi(1.0, 1.0, 0.0, ptr::null_mut()), CpmStatus::NullPointer);
        assert_eq!(last_error(), "out is null");
    }
}

#[test]
fn simulation_through_handle() {
    let mut g: *mut CpmGraph = ptr::null_mut();
    unsafe {
        assert_eq!(cpm_graph_from_edges(1, ptr::null(), ptr::null(), 0, &mut g), CpmStatus::Ok);
        let (mut mean, mut se, mut cens) = (0.0, 0.0, 0u64);
        assert_eq!(cpm_simulate_extinction(g, 1.0, 20_000, 0.0, 3, &mut mean, &mut se, &mut cens), CpmStatus::Ok);
        assert!((mean - 1.0).abs() < 3.0 * se && cens == 0);
        assert_eq!(
            cpm_simulate_extinction(g, 1.0, 10, 1e-9, 3, &mut mean, &mut se, &mut cens),
            CpmStatus::NoUncensoredSamples
        );
        cpm_graph_free(g);
    }
}

#[test]
fn last_error_truncates() {
    unsafe {
        let mut x = 0.0;
        cpm_phi(f64::NAN, 1.0, 0.0, &mut x);
        let full = cpm_last_error_message(ptr::null_mut(), 0);
        let mut small = [1 as c_char; 5];
        assert_eq!(cpm_last_error_message(small.as_mut_ptr(), 5), full);
        assert_eq!(small[4], 0);
        assert!(full > 4);
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/contact_meta.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["cpm_graph_free", "cpm_mu0", "CPM_STATUS_BUDGET_EXCEEDED", "typedef struct CpmGraph CpmGraph"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"contact_meta.h\"\nint main(void) { CpmGraph *g = 0; size_t n; return cpm_graph_node_count(g, &n) == CPM_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .expect("a C compiler is required for this test");
    assert!(status.success());
}

#[test]
fn static_library_links_from_c() {
    let target_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target_dir.join("libcontact_meta_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "contact_meta.h"
int main(void) {
    size_t us[] = {0, 1}, vs[] = {1, 2};
    CpmGraph *g = NULL;
    uint64_t cut = 0;
    size_t w[1];
    double h = 0.0;
    char msg[128];
    if (cpm_graph_from_edges(3, us, vs, 2, &g) != CPM_STATUS_OK) return 1;
    if (cpm_graph_min_cut(g, 1, 100, &cut, w) != CPM_STATUS_OK || cut != 1) return 2;
    cpm_graph_free(g);
    if (cpm_complete_graph_log_extinction(2, 1.0, &h) != CPM_STATUS_OK || fabs(h - log(1.75)) > 1e-12) return 3;
    if (cpm_sparse_er_tau0(1.0, &h) != CPM_STATUS_INAPPLICABLE) return 4;
    cpm_last_error_message(msg, sizeof msg);
    printf("%s\n", msg);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inapplicable"));
}
