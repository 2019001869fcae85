/*
 * Reads numbers and prints their average.
 */
import java.util.Scanner;

public class Average {
    public static void main(String[] args) {
        Scanner in = new Scanner(System.in);
        int count = 0;
        double total = 0;
        while (in.hasNextDouble()) {
            total += in.nextDouble(); // accumulate
            count++;
        }
        if (count > 0) {
            System.out.println(total / count);
        } else {
            System.out.println("No input");
        }
    }
}
