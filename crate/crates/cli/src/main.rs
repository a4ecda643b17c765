use std::io::IsTerminal;

fn main() {
    let color = susyode_cli::color_from_env(std::io::stdout().is_terminal());
    let code = susyode_cli::run(
        std::env::args_os(),
        color,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
