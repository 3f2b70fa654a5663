mod suites;

#[test]
fn family_members_have_the_right_marginals() {
    suites::family_members_have_the_right_marginals().unwrap();
}

#[test]
fn all_members_faithful_iff_info_complete() {
    suites::all_members_faithful_iff_info_complete().unwrap();
}

#[test]
fn symmetries_of_faithful_reps_are_transported() {
    suites::symmetries_of_faithful_reps_are_transported().unwrap();
}

#[test]
fn induced_action_is_a_homomorphism() {
    suites::induced_action_is_a_homomorphism().unwrap();
}

#[test]
fn free_parameter_count() {
    suites::free_parameter_count().unwrap();
}

#[test]
fn lifts_preserve_mass_and_positivity() {
    suites::lifts_preserve_mass_and_positivity().unwrap();
}

#[test]
fn covariant_solutions_are_unique_and_symmetric() {
    suites::covariant_solutions_are_unique_and_symmetric().unwrap();
}
