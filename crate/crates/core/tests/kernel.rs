use abrd_core::brauer::{same_class, RewriteChain, RewriteStep, Rule};
use abrd_core::{FieldTower, SymbolSum};
use proptest::prelude::*;

const P: u32 = 5;

fn tower() -> FieldTower {
    FieldTower::laurent(P, 3).unwrap()
}

fn mono() -> impl Strategy<Value = String> {
    (-2i32..=2, -2i32..=2, -2i32..=2).prop_map(|(a, b, c)| format!("a1^{a}*a2^{b}*a3^{c}"))
}

fn sum(s: &str) -> SymbolSum {
    SymbolSum::parse(P, s).unwrap()
}

proptest! {
    #[test]
    fn slot1_split_is_accepted(x in mono(), y in mono(), b in mono(), k in 1u32..P) {
        prop_assume!(x != y);
        let start = sum(&format!("[{k}*{x} + {y}, {b})"));
        let after = sum(&format!("[{k}*{x}, {b}) + [{y}, {b})"));
        let chain = RewriteChain::new(tower(), start.clone()).then(RewriteStep::new(Rule::Slot1Add, after.clone()));
        prop_assert!(chain.check().is_verified());
        prop_assert!(same_class(&start, &after).unwrap());
    }

    #[test]
    fn slot2_product_is_accepted(x in mono(), b in mono(), c in mono()) {
        let start = sum(&format!("[{x}, {b}*{c})"));
        let after = sum(&format!("[{x}, {b}) + [{x}, {c})"));
        let chain = RewriteChain::new(tower(), start).then(RewriteStep::new(Rule::Slot2Mult, after));
        prop_assert!(chain.check().is_verified());
    }

    #[test]
    fn wrong_multiplicity_is_rejected(x in mono(), y in mono(), b in mono(), k in 2u32..P) {
        // [x, 1) is trivial, so any multiplicity would do
        prop_assume!(x != y && b != "a1^0*a2^0*a3^0");
        let start = sum(&format!("[{x} + {y}, {b})"));
        let after = sum(&format!("{k}*[{x}, {b}) + [{y}, {b})"));
        let chain = RewriteChain::new(tower(), start).then(RewriteStep::new(Rule::Slot1Add, after));
        prop_assert!(!chain.check().is_verified());
    }

    /// Whatever the kernel accepts keeps the Brauer class.
    #[test]
    fn accepted_steps_preserve_class(x in mono(), y in mono(), b in mono(), k in 0u32..P) {
        let start = sum(&format!("[{x}, {b})"));
        let after = sum(&format!("[{x}, {b}) + {k}*[{y}, {b})"));
        let chain = RewriteChain::new(tower(), start.clone()).then(RewriteStep::new(Rule::Slot1Add, after.clone()));
        if chain.check().is_verified() {
            prop_assert!(same_class(&start, &after).unwrap());
        }
    }
}
