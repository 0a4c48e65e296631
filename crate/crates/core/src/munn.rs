//! Munn trees: the folded linear automaton of a word.
//!
//! Two words over the doubled alphabet represent the same element of the free
//! inverse semigroup exactly when their Munn trees coincide as birooted
//! graphs, which gives a decision procedure for free equality.

use crate::alphabet::SLetter;
use crate::automaton::{InverseAutomaton, PendingAutomaton};

/// Folds the linear automaton of `w`. The result is a tree (as an undirected
/// graph) with the initial root at the start of the word path and the final
/// root where the path ends.
pub fn munn_tree(letters: usize, w: &[SLetter]) -> InverseAutomaton {
    PendingAutomaton::linear(letters, w).fold()
}

/// Equality in the free inverse semigroup on `letters` generators.
pub fn eq_free(letters: usize, u: &[SLetter], v: &[SLetter]) -> bool {
    munn_tree(letters, u).iso(&munn_tree(letters, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn w(al: &Alphabet, s: &str) -> Vec<SLetter> {
        al.parse_word(s).unwrap().letters().to_vec()
    }

    #[test]
    fn idempotent_shortening_identified() {
        let al = Alphabet::new(["x"]).unwrap();
        assert!(eq_free(1, &w(&al, "x x' x"), &w(&al, "x")));
        assert!(!eq_free(1, &w(&al, "x x"), &w(&al, "x")));
    }

    #[test]
    fn tree_law_edges_vertices() {
        // a Munn tree always has exactly vertices - 1 positive edges
        let al = Alphabet::new(["x", "y"]).unwrap();
        for s in ["x", "x x'", "x y y' x' x", "y x x' y' y x", "x x x'"] {
            let t = munn_tree(2, &w(&al, s));
            assert_eq!(t.positive_edge_count(), t.vertex_count() - 1, "word {s}");
        }
    }

    #[test]
    fn commuting_idempotents_share_a_tree_but_roots_can_differ() {
        let al = Alphabet::new(["x", "y"]).unwrap();
        let e = w(&al, "x x' y y'");
        let f = w(&al, "y y' x x'");
        assert!(eq_free(2, &e, &f));
        let g = w(&al, "x x' y");
        assert!(!eq_free(2, &e, &g));
    }

    #[test]
    fn empty_word_is_a_point() {
        let t = munn_tree(2, &[]);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.initial(), t.final_vertex());
        assert!(!t.is_complete_singleton());
    }

    #[test]
    fn inverse_word_swaps_roots() {
        let al = Alphabet::new(["x", "y"]).unwrap();
        let u = crate::alphabet::Word::new(w(&al, "x y"));
        let ui = u.inverse();
        let a = munn_tree(2, u.letters());
        let b = munn_tree(2, ui.letters());
        let mut swapped = PendingAutomaton::from_automaton(&b);
        let (i, f) = (b.initial(), b.final_vertex());
        swapped.set_initial(f);
        swapped.set_final(i);
        assert!(a.iso(&swapped.fold()));
    }
}
