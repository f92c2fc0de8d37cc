//! The CLI against direct library calls: each command must return exactly what
//! the module it binds computes.

use std::process::{Command, Output};

use serde_json::{json, Value};

use tyangian::dynkin::{cartan_matrix, invast, DynkinType, TypeSign};
use tyangian::kclass::longest_reflection_transform;
use tyangian::polarization::{build_instance, solve};
use tyangian::ratfield::{RatFunc, Var};
use tyangian::rkmat::{k_matrix, KMatrixKind};
use tyangian::tableaux::{poincare_polynomial, InstantonKind};

fn tyangian(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tyangian")).args(args.split_whitespace()).output().unwrap()
}

fn report(args: &str) -> Value {
    let out = tyangian(args);
    assert_eq!(out.status.code(), Some(0), "{args}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["toolVersion"], env!("CARGO_PKG_VERSION"));
    assert!(v["wallTimeMs"].is_u64());
    assert_eq!(v["command"], json!(args.split_whitespace().collect::<Vec<_>>()));
    v["results"].clone()
}

#[test]
fn dynkin_info_binds_cartan_data() {
    let r = report("dynkin info --type A4");
    let t: DynkinType = "A4".parse().unwrap();
    let c = cartan_matrix(t);
    assert_eq!(r["cartan"], json!(c.cartan));
    assert_eq!(r["coxeter"], 5);
    assert_eq!(r["invast"], json!(invast(t)));
    assert_eq!(r["longestWordLength"], 10);
}

#[test]
fn kclass_w0_binds_transform() {
    let r = report("kclass w0 --type D5");
    let entries = longest_reflection_transform("D5".parse().unwrap()).unwrap();
    assert_eq!(r["entries"], serde_json::to_value(&entries).unwrap());
    assert!(r["entries"].as_array().unwrap().iter().all(|e| e["coefficient"] == "-q^8"));
}

#[test]
fn so_betti_reports_two_components() {
    let r = report("tableaux betti --kind so --l 2 --w1 3");
    assert_eq!(r["components"], 2);
    assert_eq!(r["componentSizes"], json!([4, 4]));
    assert_eq!(r["count"], 8);
    let p = poincare_polynomial(InstantonKind::So, 2, 3).unwrap();
    assert_eq!(r["poincare"], p.to_string());
}

#[test]
fn betti_emit_streams_tableaux() {
    let out = tyangian("tableaux betti --kind sp --l 3 --w1 2 --emit tableaux");
    assert!(out.status.success());
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 9 + 1);
    assert!(lines[..9].iter().all(|l| l["tableau"].is_object() && l["charges"].is_object()));
    assert_eq!(lines[9]["results"]["poincare"], "1 + 2t^2 + 3t^4 + 3t^6");
}

#[test]
fn verify_flag_plus_holds() {
    let r = report("verify --scenario flagPlus --l 2");
    assert_eq!(r[0]["holds"], true);
    assert_eq!(r[0]["mode"], "symbolic");
}

#[test]
fn failed_verification_exits_one() {
    let out = tyangian("verify --scenario flagMinus --l 2 --placement diagonal");
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["holds"], false);
    assert!(v["results"][0]["counterexample"].is_object());
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    for (args, flag) in [
        ("polarization solve --sign nope --l 3", "--sign"),
        ("dynkin info --type B3", "--type"),
        ("tableaux betti --kind sp --l 0 --w1 1", "--l"),
        ("verify --l 2", "--scenario"),
        ("rkmat emit --l 3", "--kind"),
    ] {
        let out = tyangian(args);
        assert_eq!(out.status.code(), Some(2), "{args}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains(flag), "{args}");
    }
}

#[test]
fn polarization_solve_binds_solver() {
    let r = report("polarization solve --sign minus --l 3");
    assert_eq!(r["verdict"], "UNSAT");
    let lib = serde_json::to_value(solve(&build_instance(TypeSign::Minus, 3).unwrap())).unwrap();
    assert_eq!(r, lib);
}

#[test]
fn polarization_table() {
    let r = report("table polarization --max-l 6");
    let rows: Vec<(String, u64, String)> = r
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["sign"].as_str().unwrap().into(), x["ell"].as_u64().unwrap(), x["verdict"].as_str().unwrap().into()))
        .collect();
    for (sign, ell, verdict) in rows {
        let sat = sign == "+" || ell == 2;
        assert_eq!(verdict, if sat { "SAT" } else { "UNSAT" }, "({sign},{ell})");
    }
}

#[test]
fn kmatrix_table_is_anti_identity() {
    let r = report("table kmatrix --kind flagPlus --l 4");
    let lib = k_matrix(KMatrixKind::FlagPlus, 4, &RatFunc::var(Var::U)).unwrap();
    assert_eq!(r, serde_json::to_value(&lib).unwrap());
    for (i, row) in r["entries"].as_array().unwrap().iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(e, if i + j == 3 { "1" } else { "0" });
        }
    }
}

#[test]
fn betti_table_csv() {
    let out = tyangian("table betti --kind sp --max-l 4 --max-w1 2");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,w1,dim,poincare"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 3);
    for row in rows {
        let (ell, w1): (u8, usize) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        assert_eq!(row[2], (w1 * (w1 + 1)).to_string());
        assert_eq!(row[3], poincare_polynomial(InstantonKind::Sp, ell, w1).unwrap().to_string());
    }
}

#[test]
fn output_is_deterministic() {
    for args in ["rkmat emit --kind spInstanton --l 3", "polarization solve --sign plus --l 5 --jobs 2"] {
        let mut a = report(args);
        let mut b = report(args);
        a.as_object_mut().map(|o| o.remove("nodes"));
        b.as_object_mut().map(|o| o.remove("nodes"));
        assert_eq!(a, b);
    }
}

#[test]
fn suite_acceptance_passes() {
    let r = report("suite acceptance");
    let rs = r.as_array().unwrap();
    assert_eq!(rs.len(), 11);
    assert!(rs.iter().all(|c| c["passed"] == true));
}
