// C ABI surface; populated below.
