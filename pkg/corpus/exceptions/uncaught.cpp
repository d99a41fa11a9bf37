// VERDICT: FAILED
// PROPERTY: uncaught exception
int main() {
  throw 1;
}
