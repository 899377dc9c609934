fn main() {
    let outcome = monobound::cli::run(std::env::args_os());
    print!("{}", outcome.stdout);
    std::process::exit(outcome.exit_code);
}
