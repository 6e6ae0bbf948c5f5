macro_rules! example {
    ($m:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
        #[test]
        fn $m() {
            $m::run().expect(concat!($file, " should run"));
        }
    };
}

example!(expressions, "expressions.rs");
example!(curvature, "curvature.rs");
example!(wstar_tensor, "wstar_tensor.rs");
example!(divergence, "divergence.rs");
example!(krupka, "krupka.rs");
example!(perfect_fluid, "perfect_fluid.rs");
example!(semisymmetry, "semisymmetry.rs");
example!(classify, "classify.rs");
example!(metric_file, "metric_file.rs");
example!(symmetry_fields, "symmetry_fields.rs");
