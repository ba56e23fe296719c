fn main() {
    let reports = laxjac::selftest::run_all(0);
    eprint!("{}", laxjac::selftest::format_table(&reports));
}
