use hyperconv_core::expr::Expr;
use hyperconv_core::measure::GridMeasure;
use hyperconv_core::SturmLiouvilleModel;
use proptest::prelude::*;
use std::fs;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn corpus_seeds_parse() {
    for (p, s) in seeds("expr_parse") {
        let e = Expr::parse(&s).unwrap_or_else(|e| panic!("{p}: {e}"));
        assert!(e.eval(0.5).is_finite(), "{p}");
    }
    for (p, s) in seeds("model_spec") {
        SturmLiouvilleModel::from_spec_str(&s).unwrap_or_else(|e| panic!("{p}: {e}"));
    }
    for (p, s) in seeds("model_alias") {
        SturmLiouvilleModel::from_alias(&s).unwrap_or_else(|e| panic!("{p}: {e}"));
    }
    for (p, s) in seeds("measure_csv") {
        let m = GridMeasure::from_csv(&s).unwrap_or_else(|e| panic!("{p}: {e}"));
        let back = GridMeasure::from_csv(&m.to_csv()).unwrap();
        assert!((back.mass() - m.mass()).abs() < 1e-12, "{p}");
    }
}

proptest! {
    #[test]
    fn parsers_never_panic(s in "\\PC{0,64}") {
        let _ = Expr::parse(&s).map(|e| e.eval(1.0));
        let _ = SturmLiouvilleModel::from_spec_str(&s);
        let _ = SturmLiouvilleModel::from_alias(&s);
        let _ = GridMeasure::from_csv(&s);
    }

    #[test]
    fn expr_grammar_fragments(s in "[x0-9.()+*/^ -]{0,24}|(sinh|cosh|exp|ln|sqrt|tanh)\\([x0-9.+*^-]{0,8}\\)") {
        let _ = Expr::parse(&s).map(|e| e.eval(0.7));
    }

    #[test]
    fn csv_fragments(s in "(# (grid|atom) [-0-9.e ]{0,16}\n)?t,density\n([-0-9.e]{0,6},[-0-9.e]{0,6}\n){0,6}") {
        if let Ok(m) = GridMeasure::from_csv(&s) {
            prop_assert!(GridMeasure::from_csv(&m.to_csv()).is_ok());
        }
    }

    #[test]
    fn spec_fragments(s in "((family|alpha|beta|alpha0|scale|a|name|x_regular) ?= ?(naimark|jacobi|custom|bk|[-0-9.e]{1,5}|sinh\\(x\\))\n){0,4}") {
        let _ = SturmLiouvilleModel::from_spec_str(&s);
    }
}
