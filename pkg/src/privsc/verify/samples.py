"""Sample annotated contracts used across the tests and the CLI."""

ACCOUNT_SOURCE = """\
class Account {
    int balance;
    // invariant balance >= 0

    // requires amount >= 0
    // ensures balance == amount
    void init(int amount) {
        balance = amount;
    }

    // requires amount > 0
    // ensures balance == \\old(balance) + amount
    void deposit(int amount) {
        balance += amount;
    }

    // requires amount > 0 && amount <= balance
    // ensures balance == \\old(balance) - amount
    void withdraw(int amount) {
        balance -= amount;
    }

    // ensures \\result == balance
    int getBalance() {
        return balance;
    }
}
"""

# The crowdfunding case study keeps its published annotation, which the
# shown body cannot satisfy: the raw sum is returned whether or not it
# reaches the minimum, so verification surfaces a counterexample.
CROWDFUND_CASE_STUDY_SOURCE = """\
class Crowdfunding {
    int minimum = 1000;

    // requires 0 < n
    // ensures \\result >= minimum
    int crowdfund(int n, int[] inputs) {
        int sum = 0;
        // invariant 0 <= i && i <= n
        for (int i = 0; i < n; i++) {
            sum += inputs[i];
        }
        return sum;
    }
}
"""

# Thresholded variant whose annotation is actually satisfiable; used as
# the registry package for the crowdfund circuit.
CROWDFUND_GUARDED_SOURCE = """\
class Crowdfunding {
    int minimum = 1000;

    // requires 0 <= x && 0 <= y
    // ensures \\result == 0 || \\result >= minimum
    int crowdfund(int x, int y) {
        int sum = x + y;
        int ret = 0;
        if (sum >= minimum) {
            ret = sum;
        }
        return ret;
    }
}
"""

MILLIONAIRE_SOURCE = """\
class Millionaire {
    // ensures \\result == 0 || \\result == 1
    int richer(int x, int y) {
        int out = 0;
        if (y > x) {
            out = 1;
        }
        return out;
    }
}
"""
