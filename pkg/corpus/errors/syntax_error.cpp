// VERDICT: ERROR
class A {
