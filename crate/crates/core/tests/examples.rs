macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run().expect(concat!($file, " should run"));
        }
    };
}

example!(chsh_boxes, "chsh_boxes.rs");
example!(decompositions, "decompositions.rs");
example!(linear_program, "linear_program.rs");
example!(rti_verification, "rti_verification.rs");
example!(steering, "steering.rs");
example!(universal_bound, "universal_bound.rs");
example!(binary_bob, "binary_bob.rs");
example!(reproduce, "reproduce.rs");
