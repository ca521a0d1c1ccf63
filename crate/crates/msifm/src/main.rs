fn main() {
    // A downstream `head` closing the pipe must end the process quietly,
    // the way other line tools die, not with a panic trace.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(msifm::commands::main_entry());
}
